#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "maoplb/consensus.hpp"
#include "maoplb/environment.hpp"
#include "maoplb/estimation.hpp"
#include "maoplb/graph.hpp"
#include "maoplb/policy.hpp"
#include "maoplb/rng.hpp"

namespace maoplb
{

class ConfigError : public Error
{
public:
  using Error::Error;
};

struct GraphSpec
{
  enum class Type
  {
    erdos_renyi,
    k_regular,
    complete,
    path
  };
  Type type = Type::complete;
  double p = 1.0;
  std::size_t k = 2;
};

inline const char *to_string(GraphSpec::Type t)
{
  switch (t)
  {
    case GraphSpec::Type::erdos_renyi:
      return "erdos_renyi";
    case GraphSpec::Type::k_regular:
      return "k_regular";
    case GraphSpec::Type::complete:
      return "complete";
    case GraphSpec::Type::path:
      return "path";
  }
  return "?";
}

struct DecisionSetSpec
{
  Vector center{0.5, 0.5};
  double radius = 1.0 / std::sqrt(2.0);
  std::size_t points = 360;
};

// Defaults are the reference experiment: tau 0.5, c0 0, d 2, T 5000, N 100, ridge 0.1,
// R 0.05, delta 0.01 on the disk |x - (0.5, 0.5)| <= 1/sqrt(2).
struct SimConfig
{
  std::size_t n_agents = 100;
  std::size_t dim = 2;
  std::size_t horizon = 5000;
  double tau = 0.5;
  double c0 = 0.0;
  double ridge = 0.1;
  double noise_r = 0.05;
  double delta = 0.01;
  double s_bound = 4.0;
  double local_spread = 0.5;
  Vector theta_global{2.7, 0.6};
  Vector mu_global{0.1, 0.8};
  DecisionSetSpec decision_set;
  GraphSpec graph;
  std::uint64_t seed = 1;

  void validate() const
  {
    if (n_agents < 1)
    {
      throw ConfigError("n_agents must be at least 1");
    }
    if (dim < 1)
    {
      throw ConfigError("dim must be at least 1");
    }
    if (horizon < 1)
    {
      throw ConfigError("horizon must be at least 1");
    }
    if (!(tau > c0))
    {
      throw ConfigError("tau must exceed c0");
    }
    if (!(ridge > 0.0))
    {
      throw ConfigError("ridge must be positive");
    }
    if (!(noise_r >= 0.0) || !std::isfinite(noise_r))
    {
      throw ConfigError("noise_r must be finite and nonnegative");
    }
    if (!(delta > 0.0 && delta < 1.0))
    {
      throw ConfigError("delta must lie in (0, 1)");
    }
    if (!(s_bound > 0.0))
    {
      throw ConfigError("s_bound must be positive");
    }
    if (!(local_spread >= 0.0))
    {
      throw ConfigError("local_spread must be nonnegative");
    }
    if (theta_global.size() != dim || mu_global.size() != dim)
    {
      throw ConfigError("theta_global and mu_global must have length dim");
    }
    if (dim != 2 || decision_set.center.size() != 2)
    {
      throw ConfigError("the disk decision set requires dim == 2");
    }
    if (graph.type == GraphSpec::Type::erdos_renyi && !(graph.p > 0.0 && graph.p <= 1.0))
    {
      throw ConfigError("graph.p must lie in (0, 1]");
    }
    if (n_agents < 2 && graph.type != GraphSpec::Type::complete)
    {
      throw ConfigError("only the complete graph supports a single agent");
    }
    if (graph.type == GraphSpec::Type::k_regular &&
        (graph.k < 2 || graph.k + 1 > n_agents || (graph.k % 2 != 0 && graph.k + 1 != n_agents)))
    {
      throw ConfigError("graph.k must be even with 2 <= k <= n_agents-1, or exactly n_agents-1");
    }
  }
};

inline Topology make_topology(const GraphSpec &g, std::size_t n, Rng &rng)
{
  switch (g.type)
  {
    case GraphSpec::Type::erdos_renyi:
      return gen_erdos_renyi(n, g.p, rng);
    case GraphSpec::Type::k_regular:
      return gen_k_regular(n, g.k);
    case GraphSpec::Type::complete:
      return complete_graph(n);
    case GraphSpec::Type::path:
      return path_graph(n);
  }
  throw ConfigError("unknown graph type");
}

enum class Phase
{
  explore,
  communicate
};

inline const char *to_string(Phase p) { return p == Phase::explore ? "explore" : "communicate"; }

struct TraceRow
{
  std::size_t t = 0;
  std::size_t episode = 0;
  Phase phase = Phase::explore;
  Vector action;
  double exp_reward = 0.0;
  double exp_cost = 0.0;
  double sampled_cost = 0.0;  // agents' mean observed cost
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  double est_error = 0.0;
};

struct EpisodeRecord
{
  std::size_t s = 0;
  std::size_t t_start = 0;
  std::size_t q = 0;
  std::size_t acting_agent = 0;  // 1-based
  MixturePolicy policy;
  Vector action;
  double optimistic_value = 0.0;
  // Ellipsoids used at the start of the episode contain the true globals, for every agent.
  bool reward_covered = true;
  bool cost_covered = true;
};

struct Trace
{
  SimConfig config;
  double lambda2_abs = 0.0;
  double optimal_value = 0.0;
  MixturePolicy optimal_policy;
  std::vector<TraceRow> rows;
  std::vector<EpisodeRecord> episodes;
  std::vector<RlsState> final_states;
  std::vector<std::string> warnings;

  bool reward_covered_throughout() const
  {
    for (const auto &e : episodes)
    {
      if (!e.reward_covered)
      {
        return false;
      }
    }
    return true;
  }
  bool cost_covered_throughout() const
  {
    for (const auto &e : episodes)
    {
      if (!e.cost_covered)
      {
        return false;
      }
    }
    return true;
  }
};

// Coordinator's uniform draw, 1-based.
inline std::size_t select_agent(std::size_t n, Rng &rng)
{
  return 1 + static_cast<std::size_t>(rng.index(n));
}

// || mean_i theta_hat^i - theta_g ||_2
inline double estimation_error(std::span<const RlsState> states, const Vector &theta_g)
{
  Vector mean(theta_g.size());
  for (const auto &s : states)
  {
    mean += s.theta_hat();
  }
  mean *= 1.0 / static_cast<double>(states.size());
  return norm2(mean - theta_g);
}

//
// One replication of the episodic loop. Episode s: the coordinator draws an agent, that
// agent solves the optimistic-pessimistic policy from its estimates and samples the
// network action, every agent observes, and if the horizon leaves room the agents run
// q(s) averaging steps while replaying the action, then refresh their estimates.
// Episode s occupies rows t_s .. t_s + q(s); the next one starts at t_s + q(s) + 1.
//
// Independent streams are derived from the seed for the graph (splitmix64(seed ^ 1)),
// the local parameters (splitmix64(seed ^ 2)) and the dynamics (splitmix64(seed ^ 3)).
//
inline Trace run(const SimConfig &cfg)
{
  cfg.validate();
  Rng graph_rng(splitmix64(cfg.seed ^ 1));
  Rng instance_rng(splitmix64(cfg.seed ^ 2));
  Rng rng(splitmix64(cfg.seed ^ 3));

  const std::size_t n = cfg.n_agents;
  const StructureMatrix w = build_structure_matrix(make_topology(cfg.graph, n, graph_rng));
  const DecisionSet ds =
    discretize_disk(cfg.decision_set.center, cfg.decision_set.radius, cfg.decision_set.points);
  const GlobalProblem problem = make_instance(n, cfg.theta_global, cfg.mu_global, cfg.local_spread,
                                              cfg.s_bound, ds, cfg.tau, instance_rng);
  if (std::abs(problem.c0 - cfg.c0) > 1e-12)
  {
    throw ConfigError("c0 does not match the safe action's true cost");
  }
  const ConfidenceParams params = ConfidenceParams::make(
    cfg.noise_r, n, cfg.dim, cfg.ridge, cfg.s_bound, ds.max_norm, cfg.delta, cfg.tau, cfg.c0);
  const NoiseModel noise{cfg.noise_r};

  Trace trace;
  trace.config = cfg;
  trace.lambda2_abs = w.lambda2_abs;
  trace.warnings = problem.warnings;
  trace.optimal_policy = oracle_optimal_policy(ds, cfg.theta_global, cfg.mu_global, cfg.tau);
  trace.optimal_value = expected_value(trace.optimal_policy, cfg.theta_global);

  std::vector<RlsState> states(n, RlsState(cfg.dim, cfg.ridge));
  std::vector<double> rewards(n), costs(n);
  double cum = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);

  auto push_row = [&](std::size_t t, std::size_t s, Phase ph, const Vector &x, double er,
                      double ec, double sc, double err)
  {
    const double inst = trace.optimal_value - er;
    cum += inst;
    trace.rows.push_back(TraceRow{t, s, ph, x, er, ec, sc, inst, cum, err});
  };

  std::size_t t = 1;
  for (std::size_t s = 1; t <= cfg.horizon; s++)
  {
    const std::size_t q = comm_phase_length(n, s, w.lambda2_abs);
    const std::size_t ts = t;

    EpisodeRecord ep;
    ep.s = s;
    ep.t_start = ts;
    ep.q = q;
    for (const auto &st : states)
    {
      ep.reward_covered = ep.reward_covered && reward_covered(st, params, cfg.theta_global);
      ep.cost_covered = ep.cost_covered && cost_covered(st, params, cfg.mu_global);
    }
    ep.acting_agent = select_agent(n, rng);
    auto sol = solve_optimistic_policy(ds, states[ep.acting_agent - 1], params);
    ep.policy = std::move(sol.policy);
    ep.optimistic_value = sol.value;
    const Vector x = ep.policy.support[ep.policy.sample_slot(rng)];
    ep.action = x;

    double mean_cost = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      const auto o = observe(x, problem.locals[i], noise, rng);
      rewards[i] = o.reward;
      costs[i] = o.cost;
      mean_cost += o.cost * inv_n;
    }
    const double err = estimation_error(states, cfg.theta_global);
    push_row(ts, s, Phase::explore, x, expected_value(ep.policy, cfg.theta_global),
             expected_value(ep.policy, cfg.mu_global), mean_cost, err);
    trace.episodes.push_back(std::move(ep));

    if (ts + q > cfg.horizon)
    {
      break;
    }

    const auto y = run_consensus(rewards, w, q);
    const auto z = run_consensus(costs, w, q);
    const double xr = dot(x, cfg.theta_global), xc = dot(x, cfg.mu_global);
    for (std::size_t h = 1; h <= q; h++)
    {
      double replay_cost = 0.0;
      for (std::size_t i = 0; i < n; i++)
      {
        replay_cost += observe(x, problem.locals[i], noise, rng).cost * inv_n;
      }
      push_row(ts + h, s, Phase::communicate, x, xr, xc, replay_cost, err);
    }
    for (std::size_t i = 0; i < n; i++)
    {
      states[i] = rls_update(std::move(states[i]), x, y[i], z[i]);
    }
    t = ts + q + 1;
  }
  trace.final_states = std::move(states);
  return trace;
}

}  // namespace maoplb
