#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "maoplb/estimation.hpp"
#include "maoplb/rng.hpp"

using namespace maoplb;

namespace
{

ConfidenceParams unit_params()
{
  // R = 0, lambda = 1, S = 1, L = 1: beta = sqrt(1) * 1 + 1 / sqrt(1) = 2 for every s.
  return ConfidenceParams::make(0.0, 1, 2, 1.0, 1.0, 1.0, 0.1, 0.5, 0.0);
}

}  // namespace

TEST(ConfidenceParams, Validation)
{
  EXPECT_THROW(ConfidenceParams::make(0.1, 1, 2, 1.0, 1.0, 1.0, 0.1, 0.0, 0.0), EstimationError);
  EXPECT_THROW(ConfidenceParams::make(0.1, 1, 2, 0.0, 1.0, 1.0, 0.1, 0.5, 0.0), EstimationError);
  EXPECT_THROW(ConfidenceParams::make(0.1, 1, 2, 1.0, 1.0, 1.0, 1.0, 0.5, 0.0), EstimationError);
  const auto p = ConfidenceParams::make(0.1, 1, 2, 1.0, 1.0, 1.0, 0.1, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(p.rho(), 5.0);
  EXPECT_DOUBLE_EQ(p.for_joint_coverage().delta, 0.05);
}

TEST(Beta, Examples)
{
  const auto p = unit_params();
  for (std::size_t s : {0u, 1u, 10u, 1000u})
  {
    EXPECT_DOUBLE_EQ(beta(s, p), 2.0);
  }
  // R = 1, N = 4, d = 1, lambda = 1, L = 0: beta = sqrt(ln(1/delta)) / 2 + S.
  const auto q = ConfidenceParams::make(1.0, 4, 1, 1.0, 0.3, 0.0, 0.05, 0.5, 0.0);
  EXPECT_NEAR(beta(7, q), 1.165409191301142669, 1e-14);

  ConfidenceParams d = ConfidenceParams::make(0.05, 100, 2, 0.1, 4.0, std::sqrt(2.0), 0.01, 0.5, 0.0);
  EXPECT_GT(beta(10, d), beta(1, d));
  double prev = beta(0, d);
  for (std::size_t s = 1; s < 200; s++)
  {
    EXPECT_GT(beta(s, d), prev);
    prev = beta(s, d);
  }
}

TEST(Beta, FormulaByTerms)
{
  const auto p = ConfidenceParams::make(0.5, 10, 2, 0.1, 3.0, 1.5, 0.1, 0.5, 0.0);
  const double s = 25.0;
  const double expected = 0.5 / std::sqrt(10.0) * std::sqrt(2.0 * std::log((1.0 + s * 2.25 / 0.1) / 0.1)) +
                          std::sqrt(0.1) * 3.0 + 1.5 / std::sqrt(0.1);
  EXPECT_NEAR(beta(25, p), expected, 1e-13);
}

TEST(RlsUpdate, Examples)
{
  const RlsState empty(2, 1.0);
  EXPECT_EQ(empty.theta_hat(), (Vector{0, 0}));
  EXPECT_EQ(empty.episodes(), 0u);

  const RlsState one = rls_update(empty, Vector{1, 0}, 1.0, 0.0);
  EXPECT_EQ(one.gram().matrix(), (Matrix{{2, 0}, {0, 1}}));
  EXPECT_NEAR(one.theta_hat()[0], 0.5, 1e-15);
  EXPECT_NEAR(one.theta_hat()[1], 0.0, 1e-15);
  EXPECT_EQ(one.mu_hat(), (Vector{0, 0}));
  EXPECT_EQ(one.episodes(), 1u);

  const RlsState two = rls_update(one, Vector{0, 1}, 2.0, 0.0);
  EXPECT_NEAR(two.theta_hat()[0], 0.5, 1e-15);
  EXPECT_NEAR(two.theta_hat()[1], 1.0, 1e-15);
  EXPECT_THROW(rls_update(two, Vector{1, 0, 0}, 1.0, 0.0), DimensionError);
}

TEST(RlsUpdate, MatchesBatchSolve)
{
  Rng rng(31);
  for (int trial = 0; trial < 50; trial++)
  {
    const std::size_t d = 1 + trial % 4;
    const double ridge = rng.uniform(0.05, 2.0);
    RlsState st(d, ridge);
    Eigen::MatrixXd g = ridge * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd by = Eigen::VectorXd::Zero(d), bz = Eigen::VectorXd::Zero(d);
    const int steps = 1 + static_cast<int>(rng.index(40));
    for (int k = 0; k < steps; k++)
    {
      Vector x(d);
      Eigen::VectorXd ex(d);
      for (std::size_t i = 0; i < d; i++)
      {
        x[i] = ex(i) = rng.uniform(-1, 1);
      }
      const double y = rng.normal(), z = rng.normal();
      st = rls_update(st, x, y, z);
      g += ex * ex.transpose();
      by += y * ex;
      bz += z * ex;
    }
    const Eigen::VectorXd th = g.ldlt().solve(by), mu = g.ldlt().solve(bz);
    for (std::size_t i = 0; i < d; i++)
    {
      EXPECT_NEAR(st.theta_hat()[i], th(i), 1e-9);
      EXPECT_NEAR(st.mu_hat()[i], mu(i), 1e-9);
      for (std::size_t j = 0; j < d; j++)
      {
        EXPECT_NEAR(st.gram().matrix()(i, j), g(i, j), 1e-12);
      }
    }
    EXPECT_EQ(st.episodes(), static_cast<std::size_t>(steps));
  }
}

TEST(Ellipsoid, OptimisticAndPessimisticExamples)
{
  const auto p = unit_params();  // rho = 5, beta = 2
  const RlsState fresh(2, 1.0);
  // rho * beta * ||x||_{I^-1} = 10 for x = (1, 0).
  EXPECT_DOUBLE_EQ(optimistic_reward(Vector{1, 0}, fresh, p), p.rho() * 2.0);
  EXPECT_EQ(optimistic_reward(Vector{0, 0}, fresh, p), 0.0);
  EXPECT_DOUBLE_EQ(pessimistic_cost(Vector{0, 1}, fresh, p), 2.0);
  EXPECT_EQ(pessimistic_cost(Vector{0, 0}, fresh, p), 0.0);

  // The example radius rho * beta = 2: tau - c0 = 2 gives rho = 2, and beta = 1 with
  // S = 0, L = 1, lambda = 1.
  const auto q = ConfidenceParams::make(0.0, 1, 2, 1.0, 0.0, 1.0, 0.1, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(optimistic_reward(Vector{1, 0}, fresh, q), 2.0);

  // Zero radius is the point estimate.
  const auto z = ConfidenceParams::make(0.0, 1, 2, 1.0, 0.0, 0.0, 0.1, 0.5, 0.0);
  RlsState st = rls_update(fresh, Vector{1, 1}, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(optimistic_reward(Vector{0.3, 0.7}, st, z), dot(Vector{0.3, 0.7}, st.theta_hat()));
  EXPECT_DOUBLE_EQ(pessimistic_cost(Vector{0.3, 0.7}, st, z), dot(Vector{0.3, 0.7}, st.mu_hat()));
}

TEST(Ellipsoid, OptimisticRewardBoundsSampledParameters)
{
  Rng rng(5);
  const auto p = ConfidenceParams::make(0.3, 4, 2, 0.5, 2.0, 1.0, 0.1, 0.5, 0.0);
  for (int trial = 0; trial < 20; trial++)
  {
    RlsState st(2, 0.5);
    for (int k = 0; k < 5 + trial; k++)
    {
      st = rls_update(st, Vector{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.normal(), rng.normal());
    }
    const Vector x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double radius = p.rho() * beta(st.episodes(), p);
    const double ub = optimistic_reward(x, st, p);

    // theta = theta_hat + radius * L^{-T} u with |u| <= 1 covers the ellipsoid.
    const Matrix &l = st.gram().cholesky_factor();
    for (int k = 0; k < 500; k++)
    {
      const double ang = rng.uniform(0, 2 * 3.141592653589793), r = std::sqrt(rng.uniform());
      const double u0 = r * std::cos(ang), u1 = r * std::sin(ang);
      // Solve L^T v = u.
      const double v1 = u1 / l(1, 1);
      const double v0 = (u0 - l(1, 0) * v1) / l(0, 0);
      const Vector theta = st.theta_hat() + radius * Vector{v0, v1};
      EXPECT_LE(weighted_norm(theta - st.theta_hat(), st.gram()), radius * (1 + 1e-12));
      EXPECT_LE(dot(x, theta), ub + 1e-12);
    }
    // The analytic maximizer attains the bound.
    const Vector sx = pd_solve(st.gram(), x);
    const Vector arg = st.theta_hat() + (radius / inv_weighted_norm(x, st.gram())) * sx;
    EXPECT_NEAR(dot(x, arg), ub, 1e-10);
  }
}

TEST(Coverage, FreshStateCoversBoundedParameters)
{
  const auto p = ConfidenceParams::make(0.1, 2, 2, 0.1, 3.0, 1.5, 0.1, 0.5, 0.0);
  const RlsState fresh(2, 0.1);
  EXPECT_TRUE(reward_covered(fresh, p, Vector{2.7, 0.6}));
  EXPECT_TRUE(cost_covered(fresh, p, Vector{0.1, 0.8}));
  RlsState st = fresh;
  for (int k = 0; k < 200; k++)
  {
    st = rls_update(st, Vector{1, 0}, 50.0, 50.0);
  }
  EXPECT_FALSE(cost_covered(st, p, Vector{0.1, 0.8}));
}
