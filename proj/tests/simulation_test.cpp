#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "maoplb/simulation.hpp"

using namespace maoplb;

namespace
{

SimConfig small_config()
{
  SimConfig c;
  c.n_agents = 8;
  c.horizon = 300;
  c.decision_set.points = 72;
  c.graph.type = GraphSpec::Type::erdos_renyi;
  c.graph.p = 0.5;
  c.seed = 12;
  return c;
}

}  // namespace

TEST(SimConfig, Validation)
{
  EXPECT_NO_THROW(SimConfig{}.validate());
  auto bad = [](auto mutate)
  {
    SimConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](SimConfig &c) { c.tau = 0.0; });
  bad([](SimConfig &c) { c.horizon = 0; });
  bad([](SimConfig &c) { c.n_agents = 0; });
  bad([](SimConfig &c) { c.ridge = 0.0; });
  bad([](SimConfig &c) { c.delta = 1.0; });
  bad([](SimConfig &c) { c.noise_r = -0.1; });
  bad([](SimConfig &c) { c.theta_global = Vector{1, 2, 3}; });
  bad(
    [](SimConfig &c)
    {
      c.graph.type = GraphSpec::Type::erdos_renyi;
      c.graph.p = 0.0;
    });
  bad(
    [](SimConfig &c)
    {
      c.graph.type = GraphSpec::Type::k_regular;
      c.graph.k = 3;
    });
  bad(
    [](SimConfig &c)
    {
      c.n_agents = 1;
      c.graph.type = GraphSpec::Type::path;
    });
}

TEST(SelectAgent, ReferenceSequence)
{
  Rng rng(2024);
  const std::vector<std::size_t> expected{1, 4, 1, 1, 4, 2, 2, 2, 3, 1, 4, 5};
  for (std::size_t e : expected)
  {
    EXPECT_EQ(select_agent(5, rng), e);
  }
}

TEST(SelectAgent, Uniform)
{
  Rng rng(3);
  const std::size_t n = 7, draws = 70000;
  std::vector<double> counts(n);
  for (std::size_t k = 0; k < draws; k++)
  {
    const std::size_t a = select_agent(n, rng);
    ASSERT_GE(a, 1u);
    ASSERT_LE(a, n);
    counts[a - 1] += 1;
  }
  const double expected = static_cast<double>(draws) / n;
  double chi2 = 0.0;
  for (double c : counts)
  {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 6 degrees of freedom, 0.999 quantile.
  EXPECT_LT(chi2, 22.46);
}

TEST(EstimationError, Examples)
{
  std::vector<RlsState> states(3, RlsState(2, 1.0));
  EXPECT_DOUBLE_EQ(estimation_error(states, Vector{3, 4}), 5.0);
  states[0] = rls_update(states[0], Vector{1, 0}, 6.0, 0.0);  // theta_hat = (3, 0)
  EXPECT_NEAR(estimation_error(states, Vector{1, 0}), 0.0, 1e-15);

  // Estimates (1, 0) and (0, 1) average to the target.
  const RlsState fresh(2, 1.0);
  std::vector<RlsState> pair{rls_update(fresh, Vector{1, 0}, 2.0, 0.0),
                             rls_update(fresh, Vector{0, 1}, 2.0, 0.0)};
  EXPECT_NEAR(estimation_error(pair, Vector{0.5, 0.5}), 0.0, 1e-15);
  EXPECT_NEAR(estimation_error(std::span<const RlsState>(pair.data(), 1), Vector{0, 0}), 1.0, 1e-15);
}

TEST(Run, SingleStepHorizon)
{
  SimConfig c = small_config();
  c.horizon = 1;
  const Trace tr = run(c);
  ASSERT_EQ(tr.rows.size(), 1u);
  EXPECT_EQ(tr.rows[0].t, 1u);
  EXPECT_EQ(tr.rows[0].phase, Phase::explore);
  EXPECT_EQ(tr.episodes.size(), 1u);
  EXPECT_DOUBLE_EQ(tr.rows[0].est_error, norm2(c.theta_global));
}

TEST(Run, EpisodeLayout)
{
  const SimConfig c = small_config();
  const Trace tr = run(c);
  // A final episode that would overrun the horizon keeps only its exploration row.
  const auto &tail = tr.episodes.back();
  ASSERT_EQ(tr.rows.size(), tail.t_start + tail.q > c.horizon ? tail.t_start : c.horizon);
  for (std::size_t k = 0; k < tr.rows.size(); k++)
  {
    EXPECT_EQ(tr.rows[k].t, k + 1);
  }
  std::size_t t = 1;
  for (std::size_t e = 0; e < tr.episodes.size(); e++)
  {
    const auto &ep = tr.episodes[e];
    EXPECT_EQ(ep.s, e + 1);
    EXPECT_EQ(ep.t_start, t);
    EXPECT_EQ(ep.q, comm_phase_length(c.n_agents, ep.s, tr.lambda2_abs));
    EXPECT_GE(ep.acting_agent, 1u);
    EXPECT_LE(ep.acting_agent, c.n_agents);
    const auto &first = tr.rows[t - 1];
    EXPECT_EQ(first.phase, Phase::explore);
    EXPECT_EQ(first.episode, ep.s);
    EXPECT_EQ(first.action, ep.action);
    const std::size_t last = t + ep.q > c.horizon ? t : t + ep.q;
    for (std::size_t u = t + 1; u <= last; u++)
    {
      const auto &row = tr.rows[u - 1];
      EXPECT_EQ(row.phase, Phase::communicate);
      EXPECT_EQ(row.episode, ep.s);
      EXPECT_EQ(row.action, ep.action);
      EXPECT_EQ(row.est_error, first.est_error);
      EXPECT_DOUBLE_EQ(row.inst_regret, tr.optimal_value - dot(ep.action, c.theta_global));
    }
    t += ep.q + 1;
  }
  double cum = 0.0;
  for (const auto &row : tr.rows)
  {
    cum += row.inst_regret;
    EXPECT_NEAR(row.cum_regret, cum, 1e-9);
    EXPECT_NEAR(row.inst_regret, tr.optimal_value - row.exp_reward, 1e-15);
  }
}

TEST(Run, TruncatedFinalEpisodeKeepsOnlyExploration)
{
  SimConfig c = small_config();
  c.graph.type = GraphSpec::Type::path;  // long phases
  c.horizon = 40;
  const Trace tr = run(c);
  const auto &last = tr.episodes.back();
  if (last.t_start + last.q > c.horizon)
  {
    EXPECT_EQ(tr.rows.back().t, last.t_start);
    EXPECT_EQ(tr.rows.back().phase, Phase::explore);
  }
  else
  {
    EXPECT_EQ(tr.rows.back().t, last.t_start + last.q);
  }
  EXPECT_LE(tr.rows.back().t, c.horizon);
}

TEST(Run, Deterministic)
{
  const SimConfig c = small_config();
  const Trace a = run(c), b = run(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); k++)
  {
    EXPECT_EQ(a.rows[k].action, b.rows[k].action);
    EXPECT_EQ(a.rows[k].sampled_cost, b.rows[k].sampled_cost);
    EXPECT_EQ(a.rows[k].cum_regret, b.rows[k].cum_regret);
  }
  SimConfig other = c;
  other.seed = 13;
  const Trace d = run(other);
  bool differs = false;
  for (std::size_t k = 0; k < a.rows.size(); k++)
  {
    differs = differs || a.rows[k].sampled_cost != d.rows[k].sampled_cost;
  }
  EXPECT_TRUE(differs);
}

TEST(Run, CompleteGraphAgentsAgree)
{
  SimConfig c = small_config();
  c.graph.type = GraphSpec::Type::complete;
  const Trace tr = run(c);
  EXPECT_LT(tr.lambda2_abs, 1e-12);
  for (const auto &ep : tr.episodes)
  {
    EXPECT_EQ(ep.q, 1u);
  }
  for (const auto &st : tr.final_states)
  {
    for (std::size_t i = 0; i < 2; i++)
    {
      EXPECT_NEAR(st.theta_hat()[i], tr.final_states[0].theta_hat()[i], 1e-12);
      EXPECT_NEAR(st.mu_hat()[i], tr.final_states[0].mu_hat()[i], 1e-12);
    }
  }
}

TEST(Run, NoiselessCostsAverageToGlobal)
{
  SimConfig c = small_config();
  c.noise_r = 0.0;
  const Trace tr = run(c);
  for (const auto &row : tr.rows)
  {
    EXPECT_NEAR(row.sampled_cost, dot(row.action, c.mu_global), 1e-12);
  }
}

TEST(Run, SafeWhileCostCovered)
{
  SimConfig c = small_config();
  c.horizon = 800;
  for (std::uint64_t seed = 1; seed <= 3; seed++)
  {
    c.seed = seed;
    const Trace tr = run(c);
    for (const auto &ep : tr.episodes)
    {
      if (ep.cost_covered)
      {
        EXPECT_LE(expected_value(ep.policy, c.mu_global), c.tau + 1e-9);
      }
    }
  }
}

TEST(Run, OptimalPolicyMatchesOracle)
{
  const SimConfig c = small_config();
  const Trace tr = run(c);
  const DecisionSet ds =
    discretize_disk(c.decision_set.center, c.decision_set.radius, c.decision_set.points);
  const auto pi = oracle_optimal_policy(ds, c.theta_global, c.mu_global, c.tau);
  EXPECT_EQ(tr.optimal_policy.indices, pi.indices);
  EXPECT_NEAR(tr.optimal_value, expected_value(pi, c.theta_global), 1e-15);
  EXPECT_LE(expected_value(pi, c.mu_global), c.tau + 1e-12);
}

TEST(Run, NoiselessRegretNonIncreasing)
{
  SimConfig c;
  c.n_agents = 5;
  c.horizon = 400;
  c.noise_r = 0.0;
  c.local_spread = 0.0;
  c.decision_set.points = 16;
  const Trace tr = run(c);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto &row : tr.rows)
  {
    if (row.phase == Phase::explore && row.episode >= 2)
    {
      EXPECT_LE(row.inst_regret, prev + 1e-12) << "episode " << row.episode;
      prev = row.inst_regret;
    }
  }
}
