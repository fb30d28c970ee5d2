#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "maoplb/numerics.hpp"
#include "maoplb/rng.hpp"

namespace maoplb
{

class GraphError : public Error
{
public:
  using Error::Error;
};

//
// Undirected simple graph over nodes 0..n-1.
//
class Topology
{
public:
  Topology() = default;
  explicit Topology(std::size_t n) : nn(n), adj(n * n, 0) {}

  static Topology from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges)
  {
    Topology t(n);
    for (auto [i, j] : edges)
    {
      t.add_edge(i, j);
    }
    return t;
  }

  void add_edge(std::size_t i, std::size_t j)
  {
    if (i >= nn || j >= nn)
    {
      throw GraphError("edge endpoint out of range");
    }
    if (i == j)
    {
      throw GraphError("self loops are not allowed");
    }
    adj[i * nn + j] = adj[j * nn + i] = 1;
  }

  std::size_t size() const { return nn; }
  bool adjacent(std::size_t i, std::size_t j) const { return adj[i * nn + j] != 0; }

  std::size_t degree(std::size_t i) const
  {
    std::size_t d = 0;
    for (std::size_t j = 0; j < nn; j++)
    {
      d += adj[i * nn + j];
    }
    return d;
  }

  std::size_t edge_count() const
  {
    std::size_t e = 0;
    for (std::size_t i = 0; i < nn; i++)
    {
      e += degree(i);
    }
    return e / 2;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const
  {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < nn; i++)
    {
      for (std::size_t j = i + 1; j < nn; j++)
      {
        if (adjacent(i, j))
        {
          e.emplace_back(i, j);
        }
      }
    }
    return e;
  }

  bool connected() const
  {
    if (nn == 0)
    {
      return false;
    }
    std::vector<char> seen(nn, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty())
    {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < nn; v++)
      {
        if (adjacent(u, v) && !seen[v])
        {
          seen[v] = 1;
          count++;
          stack.push_back(v);
        }
      }
    }
    return count == nn;
  }

  friend bool operator==(const Topology &, const Topology &) = default;

private:
  std::size_t nn = 0;
  std::vector<char> adj;
};

inline Topology complete_graph(std::size_t n)
{
  Topology t(n);
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t j = i + 1; j < n; j++)
    {
      t.add_edge(i, j);
    }
  }
  return t;
}

inline Topology path_graph(std::size_t n)
{
  Topology t(n);
  for (std::size_t i = 0; i + 1 < n; i++)
  {
    t.add_edge(i, i + 1);
  }
  return t;
}

inline Topology star_graph(std::size_t n)
{
  Topology t(n);
  for (std::size_t i = 1; i < n; i++)
  {
    t.add_edge(0, i);
  }
  return t;
}

// G(n, p) conditioned on connectivity: rejection sampling, at most 1000 draws.
inline Topology gen_erdos_renyi(std::size_t n, double p, Rng &rng)
{
  if (n < 2)
  {
    throw GraphError("erdos_renyi: need at least 2 nodes");
  }
  if (!(p > 0.0 && p <= 1.0))
  {
    throw GraphError("erdos_renyi: edge probability must lie in (0, 1]");
  }
  constexpr int max_attempts = 1000;
  for (int attempt = 0; attempt < max_attempts; attempt++)
  {
    Topology t(n);
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = i + 1; j < n; j++)
      {
        if (p >= 1.0 || rng.bernoulli(p))
        {
          t.add_edge(i, j);
        }
      }
    }
    if (t.connected())
    {
      return t;
    }
  }
  throw GraphError("erdos_renyi: no connected sample within " + std::to_string(max_attempts) +
                   " attempts");
}

// Circulant k-regular graph: i ~ i +- 1, ..., i +- k/2 (mod n). k = n-1 gives K_n.
inline Topology gen_k_regular(std::size_t n, std::size_t k)
{
  if (k < 2 || k + 1 > n)
  {
    throw GraphError("k_regular: need 2 <= k <= n-1");
  }
  if (k == n - 1)
  {
    return complete_graph(n);
  }
  if (k % 2 != 0)
  {
    throw GraphError("k_regular: unsupported regularity (odd k < n-1)");
  }
  Topology t(n);
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t off = 1; off <= k / 2; off++)
    {
      t.add_edge(i, (i + off) % n);
    }
  }
  return t;
}

struct StructureMatrix
{
  SymMatrix w;
  double lambda2_abs = 0.0;
  double spectral_gap = 1.0;

  std::size_t size() const { return w.size(); }
};

struct SpectralQuantities
{
  double lambda2_abs;
  double spectral_gap;
};

// Largest |eigenvalue| after removing the principal eigenvalue 1.
inline SpectralQuantities spectral_quantities(const SymMatrix &w)
{
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; i++)
  {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < n; j++)
    {
      rs += w(i, j);
      cs += w(j, i);
    }
    if (std::abs(rs - 1.0) > 1e-9 || std::abs(cs - 1.0) > 1e-9)
    {
      throw GraphError("structure matrix is not doubly stochastic");
    }
  }
  const auto ev = sym_eigenvalues(w);
  double l2 = 0.0;
  for (std::size_t i = 1; i < ev.size(); i++)
  {
    l2 = std::max(l2, std::abs(ev[i]));
  }
  return {l2, 1.0 - l2};
}

//
// W = I - (D - A) / (d_max + 1).
//
// This is the normalized-Laplacian construction I - D^{1/2} L D^{1/2} / (d_max + 1) with
// L = I - D^{-1/2} A D^{-1/2}, since D^{1/2} L D^{1/2} = D - A. For a k-regular graph
// d_max = k and I - k/(k+1) L reduces to the same matrix.
//
inline StructureMatrix build_structure_matrix(const Topology &t)
{
  if (!t.connected())
  {
    throw GraphError("structure matrix requires a connected topology");
  }
  const std::size_t n = t.size();
  std::size_t dmax = 0;
  for (std::size_t i = 0; i < n; i++)
  {
    dmax = std::max(dmax, t.degree(i));
  }
  const double scale = 1.0 / static_cast<double>(dmax + 1);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; i++)
  {
    w(i, i) = 1.0 - static_cast<double>(t.degree(i)) * scale;
    for (std::size_t j = 0; j < n; j++)
    {
      if (t.adjacent(i, j))
      {
        w(i, j) = scale;
      }
    }
  }
  StructureMatrix s{SymMatrix(std::move(w))};
  const auto q = spectral_quantities(s.w);
  s.lambda2_abs = q.lambda2_abs;
  s.spectral_gap = q.spectral_gap;
  return s;
}

// Edge list: one "i j" pair per line, 0-indexed, i < j.
inline void write_edge_list(std::ostream &os, const Topology &t)
{
  for (auto [i, j] : t.edges())
  {
    os << i << ' ' << j << '\n';
  }
}

// Node count defaults to 1 + the largest index seen.
inline Topology read_edge_list(std::istream &is, std::optional<std::size_t> n = std::nullopt)
{
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line))
  {
    lineno++;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    std::istringstream ls(line);
    long long i = -1, j = -1;
    std::string extra;
    if (!(ls >> i >> j) || (ls >> extra) || i < 0 || j < 0)
    {
      throw GraphError("edge list line " + std::to_string(lineno) + ": expected \"i j\"");
    }
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    max_index = std::max({max_index, edges.back().first, edges.back().second});
  }
  const std::size_t nodes = n.value_or(edges.empty() ? 0 : max_index + 1);
  return Topology::from_edges(nodes, edges);
}

}  // namespace maoplb
