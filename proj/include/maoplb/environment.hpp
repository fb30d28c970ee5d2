#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "maoplb/numerics.hpp"
#include "maoplb/rng.hpp"

namespace maoplb
{

class EnvironmentError : public Error
{
public:
  using Error::Error;
};

struct LocalProblem
{
  Vector theta;
  Vector mu;
};

struct DecisionSet
{
  std::vector<Vector> actions;
  std::size_t x0_index = 0;
  double max_norm = 0.0;  // L

  std::size_t size() const { return actions.size(); }
  std::size_t dim() const { return actions.empty() ? 0 : actions.front().size(); }
  const Vector &x0() const { return actions[x0_index]; }

  static DecisionSet from_actions(std::vector<Vector> actions, std::size_t x0_index)
  {
    if (actions.size() < 2)
    {
      throw EnvironmentError("decision set needs at least two actions");
    }
    if (x0_index >= actions.size())
    {
      throw EnvironmentError("safe action index out of range");
    }
    double l = 0.0;
    for (const auto &a : actions)
    {
      if (a.size() != actions.front().size())
      {
        throw DimensionError("decision set actions differ in dimension");
      }
      l = std::max(l, norm2(a));
    }
    return DecisionSet{std::move(actions), x0_index, l};
  }
};

//
// m equally spaced points on the circle |x - center| = radius. The point at 225 degrees
// (k = 5m/8) must be the origin; it is stored as exactly zero and becomes the safe
// action x0.
//
inline DecisionSet discretize_disk(const Vector &center, double radius, std::size_t m)
{
  if (center.size() != 2)
  {
    throw DimensionError("discretize_disk: center must be two-dimensional");
  }
  if (m < 8 || m % 8 != 0)
  {
    throw EnvironmentError("discretize_disk: point count must be a positive multiple of 8");
  }
  if (!(radius > 0.0))
  {
    throw EnvironmentError("discretize_disk: radius must be positive");
  }
  std::vector<Vector> pts;
  pts.reserve(m);
  for (std::size_t k = 0; k < m; k++)
  {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    pts.push_back(Vector{center[0] + radius * std::cos(angle), center[1] + radius * std::sin(angle)});
  }
  const std::size_t k0 = 5 * m / 8;
  const double h = radius / std::numbers::sqrt2;
  const Vector origin_candidate{center[0] - h, center[1] - h};
  if (norm2(origin_candidate) > 1e-12)
  {
    throw EnvironmentError("discretize_disk: the origin is not a grid point; no safe action");
  }
  pts[k0] = Vector{0.0, 0.0};
  return DecisionSet::from_actions(std::move(pts), k0);
}

struct GlobalProblem
{
  std::vector<LocalProblem> locals;
  Vector theta_global;
  Vector mu_global;
  double tau = 0.0;
  double c0 = 0.0;
  Vector x0;
  std::vector<std::string> warnings;

  std::size_t n_agents() const { return locals.size(); }
};

namespace detail
{
// Local vectors with the prescribed mean and norms bounded by s_bound.
inline std::vector<Vector> spread_around(const Vector &target, std::size_t n, double spread,
                                         double s_bound, Rng &rng)
{
  const std::size_t d = target.size();
  std::vector<Vector> locals(n, Vector(d));
  for (auto &v : locals)
  {
    for (std::size_t k = 0; k < d; k++)
    {
      v[k] = rng.uniform(-spread, spread);
    }
  }
  auto recenter = [&]
  {
    Vector mean(d);
    for (const auto &v : locals)
    {
      mean += v;
    }
    mean *= 1.0 / static_cast<double>(n);
    const Vector shift = target - mean;
    for (auto &v : locals)
    {
      v += shift;
    }
  };
  recenter();
  for (int iter = 0; iter < 100; iter++)
  {
    bool ok = true;
    for (auto &v : locals)
    {
      const double nv = norm2(v);
      if (nv > s_bound + 1e-12)
      {
        v *= s_bound / nv;
        ok = false;
      }
    }
    if (ok)
    {
      return locals;
    }
    recenter();
  }
  throw EnvironmentError("make_instance: spread too large for the norm bound");
}
}  // namespace detail

//
// Samples local parameters uniformly in [-spread, spread]^d around the globals and
// recentres them so their mean is exactly the global vector.
//
inline GlobalProblem make_instance(std::size_t n_agents, const Vector &theta_global,
                                   const Vector &mu_global, double spread, double s_bound,
                                   const DecisionSet &ds, double tau, Rng &rng)
{
  if (n_agents < 1)
  {
    throw EnvironmentError("make_instance: need at least one agent");
  }
  if (theta_global.size() != mu_global.size() || theta_global.size() != ds.dim())
  {
    throw DimensionError("make_instance: parameter and action dimensions differ");
  }
  if (norm2(theta_global) > s_bound || norm2(mu_global) > s_bound)
  {
    throw EnvironmentError("make_instance: global parameters exceed the norm bound S");
  }
  if (spread < 0.0)
  {
    throw EnvironmentError("make_instance: spread must be nonnegative");
  }
  GlobalProblem g;
  const auto thetas = detail::spread_around(theta_global, n_agents, spread, s_bound, rng);
  const auto mus = detail::spread_around(mu_global, n_agents, spread, s_bound, rng);
  g.locals.reserve(n_agents);
  for (std::size_t i = 0; i < n_agents; i++)
  {
    g.locals.push_back({thetas[i], mus[i]});
  }
  g.theta_global = theta_global;
  g.mu_global = mu_global;
  g.tau = tau;
  g.x0 = ds.x0();
  g.c0 = dot(g.x0, mu_global);
  if (!(g.c0 < tau))
  {
    throw EnvironmentError("make_instance: safe action cost c0 must be below tau");
  }
  for (const auto &x : ds.actions)
  {
    const double r = dot(x, theta_global), c = dot(x, mu_global);
    if (r < 0.0 || r > 1.0 || c < 0.0 || c > 1.0)
    {
      g.warnings.emplace_back("mean reward or cost leaves [0, 1] on the decision set");
      break;
    }
  }
  return g;
}

struct NoiseModel
{
  double r_std = 0.0;
};

struct Observation
{
  double reward;
  double cost;
};

// r = x.theta + eta_r, c = x.mu + eta_c; reward noise is drawn first.
inline Observation observe(const Vector &x, const LocalProblem &local, const NoiseModel &noise,
                           Rng &rng)
{
  const double er = noise.r_std * rng.normal();
  const double ec = noise.r_std * rng.normal();
  return {dot(x, local.theta) + er, dot(x, local.mu) + ec};
}

}  // namespace maoplb
