#pragma once

#include <cmath>
#include <cstddef>

#include "maoplb/numerics.hpp"

namespace maoplb
{

class EstimationError : public Error
{
public:
  using Error::Error;
};

struct ConfidenceParams
{
  double r_sub_gaussian = 0.0;  // R
  std::size_t n_agents = 1;     // N
  std::size_t dim = 1;          // d
  double ridge = 1.0;           // lambda
  double s_bound = 1.0;         // S
  double action_bound = 1.0;    // L
  double delta = 0.1;
  double tau = 0.5;
  double c0 = 0.0;

  static ConfidenceParams make(double r, std::size_t n, std::size_t d, double ridge, double s,
                               double l, double delta, double tau, double c0)
  {
    ConfidenceParams p{r, n, d, ridge, s, l, delta, tau, c0};
    p.validate();
    return p;
  }

  void validate() const
  {
    if (!(tau > c0))
    {
      throw EstimationError("confidence params: tau must exceed c0");
    }
    if (!(ridge > 0.0))
    {
      throw EstimationError("confidence params: ridge must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0))
    {
      throw EstimationError("confidence params: delta must lie in (0, 1)");
    }
    if (n_agents < 1 || dim < 1)
    {
      throw EstimationError("confidence params: need N >= 1 and d >= 1");
    }
    if (r_sub_gaussian < 0.0 || s_bound < 0.0 || action_bound < 0.0)
    {
      throw EstimationError("confidence params: R, S and L must be nonnegative");
    }
  }

  // Reward ellipsoid inflation, 1 + 2 / (tau - c0).
  double rho() const { return 1.0 + 2.0 / (tau - c0); }

  // Splits delta between the reward and cost events so both hold jointly w.p. 1 - delta.
  ConfidenceParams for_joint_coverage() const
  {
    ConfidenceParams p = *this;
    p.delta = delta / 2.0;
    return p;
  }
};

// beta_s = (R / sqrt(N)) sqrt(d ln((1 + s L^2 / lambda) / delta)) + sqrt(lambda) S + L / sqrt(lambda)
inline double beta(std::size_t s, const ConfidenceParams &p)
{
  const double sd = static_cast<double>(s);
  const double l2 = p.action_bound * p.action_bound;
  const double noise = p.r_sub_gaussian / std::sqrt(static_cast<double>(p.n_agents)) *
                       std::sqrt(static_cast<double>(p.dim) *
                                 std::log((1.0 + sd * l2 / p.ridge) / p.delta));
  return noise + std::sqrt(p.ridge) * p.s_bound + p.action_bound / std::sqrt(p.ridge);
}

//
// Ridge regression state of one agent over the episode-level data (x_k, y_k, z_k).
// gram = ridge I + sum x x^T; the estimates are recomputed by a full solve on update.
//
class RlsState
{
public:
  RlsState() = default;
  RlsState(std::size_t dim, double ridge)
    : ridge_(ridge), gram_raw(Matrix::identity(dim)), xy(dim), xz(dim), theta(dim), mu(dim)
  {
    if (!(ridge > 0.0))
    {
      throw EstimationError("rls: ridge must be positive");
    }
    gram_raw *= ridge;
    gram_pd = PDMatrix(SymMatrix(gram_raw));
  }

  std::size_t dim() const { return xy.size(); }
  double ridge() const { return ridge_; }
  std::size_t episodes() const { return s; }
  const PDMatrix &gram() const { return gram_pd; }
  const Vector &xy_sum() const { return xy; }
  const Vector &xz_sum() const { return xz; }
  const Vector &theta_hat() const { return theta; }
  const Vector &mu_hat() const { return mu; }

  friend RlsState rls_update(RlsState st, const Vector &x, double y, double z)
  {
    const std::size_t d = st.dim();
    if (x.size() != d)
    {
      throw DimensionError("rls_update: dimension mismatch");
    }
    for (std::size_t i = 0; i < d; i++)
    {
      for (std::size_t j = 0; j < d; j++)
      {
        st.gram_raw(i, j) += x[i] * x[j];
      }
    }
    st.xy += y * x;
    st.xz += z * x;
    st.gram_pd = PDMatrix(SymMatrix(st.gram_raw));
    st.theta = pd_solve(st.gram_pd, st.xy);
    st.mu = pd_solve(st.gram_pd, st.xz);
    st.s++;
    return st;
  }

private:
  double ridge_ = 1.0;
  Matrix gram_raw;
  PDMatrix gram_pd;
  Vector xy, xz, theta, mu;
  std::size_t s = 0;
};

// max over the reward ellipsoid of x.theta: x.theta_hat + rho beta ||x||_{gram^-1}
inline double optimistic_reward(const Vector &x, const RlsState &st, const ConfidenceParams &p)
{
  return dot(x, st.theta_hat()) +
         p.rho() * beta(st.episodes(), p) * inv_weighted_norm(x, st.gram());
}

// max over the cost ellipsoid of x.mu: x.mu_hat + beta ||x||_{gram^-1}
inline double pessimistic_cost(const Vector &x, const RlsState &st, const ConfidenceParams &p)
{
  return dot(x, st.mu_hat()) + beta(st.episodes(), p) * inv_weighted_norm(x, st.gram());
}

inline bool reward_covered(const RlsState &st, const ConfidenceParams &p, const Vector &theta_true)
{
  return weighted_norm(st.theta_hat() - theta_true, st.gram()) <= p.rho() * beta(st.episodes(), p);
}

inline bool cost_covered(const RlsState &st, const ConfidenceParams &p, const Vector &mu_true)
{
  return weighted_norm(st.mu_hat() - mu_true, st.gram()) <= beta(st.episodes(), p);
}

}  // namespace maoplb
