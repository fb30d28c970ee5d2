#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "maoplb/graph.hpp"
#include "maoplb/numerics.hpp"

namespace maoplb
{

class ConsensusError : public Error
{
public:
  using Error::Error;
};

namespace consensus
{
// Below this |lambda_2| the structure matrix is J/n up to rounding and one plain
// multiplication averages exactly.
inline constexpr double exact_averaging_threshold = 1e-12;
// The accelerated recursion divides by |lambda_2| and needs log(1/|lambda_2|) > 0.
inline constexpr double max_lambda2 = 1.0 - 1e-9;
inline constexpr std::size_t max_steps = 10000;
}  // namespace consensus

inline bool uses_exact_averaging(double lambda2_abs)
{
  return lambda2_abs < consensus::exact_averaging_threshold;
}

// q(eps) = ceil(ln(2N/eps) / sqrt(2 ln(1/|lambda_2|))), at least 1.
inline std::size_t consensus_steps(std::size_t n_agents, double epsilon, double lambda2_abs)
{
  if (n_agents < 1)
  {
    throw ConsensusError("consensus_steps: need at least one agent");
  }
  if (!(epsilon > 0.0))
  {
    throw ConsensusError("consensus_steps: accuracy must be positive");
  }
  if (!(lambda2_abs >= 0.0) || lambda2_abs >= 1.0)
  {
    throw ConsensusError("consensus_steps: |lambda_2| must lie in [0, 1)");
  }
  if (uses_exact_averaging(lambda2_abs))
  {
    return 1;
  }
  if (lambda2_abs > consensus::max_lambda2)
  {
    throw ConsensusError("consensus_steps: |lambda_2| too close to 1");
  }
  const double q = std::ceil(std::log(2.0 * static_cast<double>(n_agents) / epsilon) /
                             std::sqrt(2.0 * std::log(1.0 / lambda2_abs)));
  if (q > static_cast<double>(consensus::max_steps))
  {
    throw ConsensusError("consensus_steps: phase longer than the supported maximum");
  }
  return q < 1.0 ? 1 : static_cast<std::size_t>(q);
}

// Communication phase length of episode s: q(eps = 1/s).
inline std::size_t comm_phase_length(std::size_t n_agents, std::size_t episode, double lambda2_abs)
{
  if (episode < 1)
  {
    throw ConsensusError("comm_phase_length: episodes are numbered from 1");
  }
  return consensus_steps(n_agents, 1.0 / static_cast<double>(episode), lambda2_abs);
}

//
// One agent's state in the Chebyshev-accelerated averaging recursion
//
//   z_h     = sum_j 2 W_ij alpha_h^j / |lambda_2|
//   c_{h+1} = 2 c_h / |lambda_2| - c_{h-1}
//   alpha_{h+1} = (c_h / c_{h+1}) z_h - (c_{h-1} / c_{h+1}) alpha_{h-1}
//
// started from c_{-1} = 0, alpha_{-1} = 0 with c_0 temporarily halved for the first
// step (so that c_1 = 1/|lambda_2| and alpha_1 = W alpha_0) and restored to 1 afterwards.
// Then alpha_h = T_h(W/|lambda_2|) alpha_0 / T_h(1/|lambda_2|) with T_h the Chebyshev
// polynomials of the first kind. The initial value itself is not halved: halving it as
// well would give alpha_1 = W alpha_0 / 2, which does not preserve averages.
//
struct MixState
{
  double alpha = 0.0;
  double alpha_prev = 0.0;
  double c = 0.5;
  double c_prev = 0.0;
  std::size_t h = 0;

  static MixState start(double value) { return MixState{value, 0.0, 0.5, 0.0, 0}; }
};

// Single-agent update. `w_row` is row i of W; `alphas[j]` is read only where
// w_row[j] > 0, i.e. for graph neighbours and the agent itself.
inline MixState mix_agent_step(const MixState &self, std::span<const double> w_row,
                               std::span<const double> alphas, double lambda2_abs)
{
  if (w_row.size() != alphas.size())
  {
    throw DimensionError("mix_agent_step: dimension mismatch");
  }
  double z = 0.0;
  for (std::size_t j = 0; j < w_row.size(); j++)
  {
    if (w_row[j] > 0.0)
    {
      z += 2.0 * w_row[j] * alphas[j] / lambda2_abs;
    }
  }
  const double c_next = 2.0 * self.c / lambda2_abs - self.c_prev;
  if (!std::isfinite(c_next) || c_next == 0.0)
  {
    throw ConsensusError("mix: Chebyshev scalar recursion overflowed");
  }
  MixState next;
  next.alpha = (self.c / c_next) * z - (self.c_prev / c_next) * self.alpha_prev;
  next.alpha_prev = self.alpha;
  next.c = c_next;
  next.c_prev = self.h == 0 ? 2.0 * self.c : self.c;
  next.h = self.h + 1;
  return next;
}

// One synchronous round over all agents.
inline std::vector<MixState> mix_round(std::span<const MixState> states, const StructureMatrix &w)
{
  const std::size_t n = states.size();
  if (n != w.size())
  {
    throw DimensionError("mix_round: state count differs from matrix size");
  }
  if (uses_exact_averaging(w.lambda2_abs) || w.lambda2_abs > consensus::max_lambda2)
  {
    throw ConsensusError("mix_round: |lambda_2| outside [1e-12, 1 - 1e-9]");
  }
  std::vector<double> alphas(n);
  for (std::size_t i = 0; i < n; i++)
  {
    if (states[i].h != states[0].h)
    {
      throw ConsensusError("mix_round: agents are at different steps");
    }
    alphas[i] = states[i].alpha;
  }
  std::vector<MixState> next(n);
  for (std::size_t i = 0; i < n; i++)
  {
    next[i] = mix_agent_step(states[i], w.w.matrix().row(i), alphas, w.lambda2_abs);
  }
  return next;
}

// Each agent's estimate of mean(values) after q communication steps.
inline std::vector<double> run_consensus(std::span<const double> values, const StructureMatrix &w,
                                         std::size_t q)
{
  const std::size_t n = values.size();
  if (n != w.size())
  {
    throw DimensionError("run_consensus: value count differs from matrix size");
  }
  if (q < 1)
  {
    throw ConsensusError("run_consensus: need at least one step");
  }
  if (q > consensus::max_steps)
  {
    throw ConsensusError("run_consensus: phase longer than the supported maximum");
  }
  if (uses_exact_averaging(w.lambda2_abs))
  {
    Vector v(std::vector<double>(values.begin(), values.end()));
    const Vector r = w.w.matrix() * v;
    return r.data();
  }
  std::vector<MixState> states(n);
  for (std::size_t i = 0; i < n; i++)
  {
    states[i] = MixState::start(values[i]);
  }
  for (std::size_t h = 0; h < q; h++)
  {
    states = mix_round(states, w);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; i++)
  {
    out[i] = states[i].alpha;
  }
  return out;
}

// p_q(W): the same scalar recursion applied to matrix-valued iterates.
inline SymMatrix chebyshev_matrix(const StructureMatrix &w, std::size_t q)
{
  if (q < 1)
  {
    throw ConsensusError("chebyshev_matrix: need at least one step");
  }
  if (uses_exact_averaging(w.lambda2_abs))
  {
    return w.w;
  }
  if (w.lambda2_abs > consensus::max_lambda2)
  {
    throw ConsensusError("chebyshev_matrix: |lambda_2| too close to 1");
  }
  const std::size_t n = w.size();
  const double lam = w.lambda2_abs;
  Matrix a = Matrix::identity(n);
  Matrix a_prev(n, n);
  double c = 0.5, c_prev = 0.0;
  for (std::size_t h = 0; h < q; h++)
  {
    const Matrix z = (2.0 / lam) * (w.w.matrix() * a);
    const double c_next = 2.0 * c / lam - c_prev;
    if (!std::isfinite(c_next))
    {
      throw ConsensusError("chebyshev_matrix: Chebyshev scalar recursion overflowed");
    }
    Matrix next = (c / c_next) * z - (c_prev / c_next) * a_prev;
    a_prev = std::move(a);
    a = std::move(next);
    c_prev = h == 0 ? 2.0 * c : c;
    c = c_next;
  }
  return SymMatrix::symmetrize(a);
}

// || P - J/n ||_2, from the eigenvalues of the symmetric difference.
inline double averaging_error_norm(const SymMatrix &p)
{
  const std::size_t n = p.size();
  Matrix d = p.matrix();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t j = 0; j < n; j++)
    {
      d(i, j) -= inv_n;
    }
  }
  const auto ev = sym_eigenvalues(SymMatrix::symmetrize(d));
  double m = 0.0;
  for (double e : ev)
  {
    m = std::max(m, std::abs(e));
  }
  return m;
}

}  // namespace maoplb
