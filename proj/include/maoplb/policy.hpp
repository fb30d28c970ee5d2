#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "maoplb/environment.hpp"
#include "maoplb/estimation.hpp"
#include "maoplb/numerics.hpp"
#include "maoplb/rng.hpp"

namespace maoplb
{

class PolicyError : public Error
{
public:
  using Error::Error;
};

//
// Finite-support distribution over actions. Solver outputs have one or two support
// points; `indices` refer back into the decision set they were taken from.
//
struct MixturePolicy
{
  std::vector<Vector> support;
  std::vector<double> weights;
  std::vector<std::size_t> indices;

  static MixturePolicy point_mass(const Vector &x, std::size_t index = 0)
  {
    return MixturePolicy{{x}, {1.0}, {index}};
  }

  // Draws one uniform per call regardless of the support size.
  std::size_t sample_slot(Rng &rng) const
  {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); k++)
    {
      acc += weights[k];
      if (u < acc)
      {
        return k;
      }
    }
    return weights.size() - 1;
  }
};

inline double expected_value(const MixturePolicy &pi, const Vector &param)
{
  double v = 0.0;
  for (std::size_t k = 0; k < pi.support.size(); k++)
  {
    v += pi.weights[k] * dot(pi.support[k], param);
  }
  return v;
}

struct LpSolution
{
  std::size_t first = 0;   // lower-cost support index
  std::size_t second = 0;  // equals `first` for a pure action
  double weight_second = 0.0;
  double value = 0.0;
  double cost = 0.0;

  bool pure() const { return first == second; }
};

//
// max_pi sum pi_k r_k  s.t.  sum pi_k c_k <= tau,  pi in the simplex.
//
// With a single inequality an optimal basic solution is a pure action or a mixture of a
// strictly feasible action i and an infeasible action j with the constraint binding,
// weight (tau - c_i) / (c_j - c_i) on j. All of these are scanned. Ties within 1e-12 in
// value go to the lower expected cost, then to the lower (first, second) index pair.
//
inline LpSolution solve_constrained_lp(std::span<const double> reward, std::span<const double> cost,
                                       double tau)
{
  const std::size_t m = reward.size();
  if (cost.size() != m)
  {
    throw DimensionError("solve_constrained_lp: dimension mismatch");
  }
  constexpr double tie = 1e-12;
  bool found = false;
  LpSolution best;
  auto consider = [&](const LpSolution &cand)
  {
    if (!found)
    {
      best = cand;
      found = true;
      return;
    }
    if (cand.value > best.value + tie)
    {
      best = cand;
      return;
    }
    if (cand.value < best.value - tie)
    {
      return;
    }
    if (cand.cost < best.cost - tie)
    {
      best = cand;
      return;
    }
    if (cand.cost > best.cost + tie)
    {
      return;
    }
    const auto lo_c = std::min(cand.first, cand.second), hi_c = std::max(cand.first, cand.second);
    const auto lo_b = std::min(best.first, best.second), hi_b = std::max(best.first, best.second);
    if (lo_c < lo_b || (lo_c == lo_b && hi_c < hi_b))
    {
      best = cand;
    }
  };

  std::vector<std::size_t> below, above;
  for (std::size_t k = 0; k < m; k++)
  {
    if (cost[k] <= tau)
    {
      consider(LpSolution{k, k, 0.0, reward[k], cost[k]});
      if (cost[k] < tau)
      {
        below.push_back(k);
      }
    }
    else
    {
      above.push_back(k);
    }
  }
  if (!found)
  {
    throw PolicyError("constrained LP is infeasible");
  }
  for (std::size_t j : above)
  {
    for (std::size_t i : below)
    {
      if (!(reward[j] > reward[i]))
      {
        continue;
      }
      const double eta = (tau - cost[i]) / (cost[j] - cost[i]);
      const double value = (1.0 - eta) * reward[i] + eta * reward[j];
      const double c = (1.0 - eta) * cost[i] + eta * cost[j];
      consider(LpSolution{i, j, eta, value, c});
    }
  }
  return best;
}

inline MixturePolicy to_policy(const LpSolution &sol, const DecisionSet &ds)
{
  if (sol.pure())
  {
    return MixturePolicy::point_mass(ds.actions[sol.first], sol.first);
  }
  return MixturePolicy{{ds.actions[sol.first], ds.actions[sol.second]},
                       {1.0 - sol.weight_second, sol.weight_second},
                       {sol.first, sol.second}};
}

// The best feasible policy under the true global parameters.
inline MixturePolicy oracle_optimal_policy(const DecisionSet &ds, const Vector &theta_g,
                                           const Vector &mu_g, double tau)
{
  std::vector<double> r(ds.size()), c(ds.size());
  for (std::size_t k = 0; k < ds.size(); k++)
  {
    r[k] = dot(ds.actions[k], theta_g);
    c[k] = dot(ds.actions[k], mu_g);
  }
  return to_policy(solve_constrained_lp(r, c, tau), ds);
}

struct OptimisticSolution
{
  MixturePolicy policy;
  double value;  // sum pi(x) * optimistic reward of x
};

//
// Optimistic-pessimistic policy step. Each action is scored by its own ellipsoid
// maximizers (reward inflated by rho beta, cost by beta), which upper-bounds the joint
// max over a shared theta and is more conservative on cost. The safe action x0 is
// charged its known cost c0.
//
inline OptimisticSolution solve_optimistic_policy(const DecisionSet &ds, const RlsState &st,
                                                  const ConfidenceParams &p)
{
  std::vector<double> r(ds.size()), c(ds.size());
  for (std::size_t k = 0; k < ds.size(); k++)
  {
    r[k] = optimistic_reward(ds.actions[k], st, p);
    c[k] = k == ds.x0_index ? p.c0 : pessimistic_cost(ds.actions[k], st, p);
  }
  const auto sol = solve_constrained_lp(r, c, p.tau);
  return {to_policy(sol, ds), sol.value};
}

}  // namespace maoplb
