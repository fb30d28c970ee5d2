#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace maoplb
{

// Base of every error raised by this library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

class NotSymmetricError : public Error
{
public:
  NotSymmetricError() : Error("matrix is not symmetric") {}
};

class NotPositiveDefiniteError : public Error
{
public:
  NotPositiveDefiniteError() : Error("matrix is not positive definite") {}
};

//
// Dense real vector of fixed length.
//
class Vector
{
public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : v(n, value) {}
  Vector(std::initializer_list<double> init) : v(init) {}
  explicit Vector(std::vector<double> data) : v(std::move(data)) {}

  std::size_t size() const { return v.size(); }
  double &operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  auto begin() { return v.begin(); }
  auto end() { return v.end(); }
  auto begin() const { return v.begin(); }
  auto end() const { return v.end(); }
  std::span<const double> span() const { return v; }
  const std::vector<double> &data() const { return v; }

  Vector &operator+=(const Vector &o)
  {
    check_same(o);
    for (std::size_t i = 0; i < v.size(); i++)
    {
      v[i] += o.v[i];
    }
    return *this;
  }
  Vector &operator-=(const Vector &o)
  {
    check_same(o);
    for (std::size_t i = 0; i < v.size(); i++)
    {
      v[i] -= o.v[i];
    }
    return *this;
  }
  Vector &operator*=(double a)
  {
    for (auto &x : v)
    {
      x *= a;
    }
    return *this;
  }
  friend Vector operator+(Vector a, const Vector &b) { return a += b; }
  friend Vector operator-(Vector a, const Vector &b) { return a -= b; }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend bool operator==(const Vector &, const Vector &) = default;

private:
  void check_same(const Vector &o) const
  {
    if (o.size() != size())
    {
      throw DimensionError("vector dimension mismatch");
    }
  }

  std::vector<double> v;
};

inline double dot(const Vector &a, const Vector &b)
{
  if (a.size() != b.size())
  {
    throw DimensionError("dot: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); i++)
  {
    s += a[i] * b[i];
  }
  return s;
}

inline double norm2(const Vector &a) { return std::sqrt(dot(a, a)); }

//
// Dense row-major matrix.
//
class Matrix
{
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
    : nr(rows), nc(cols), a(rows * cols, value)
  {
  }
  Matrix(std::initializer_list<std::initializer_list<double>> init)
  {
    nr = init.size();
    nc = nr ? init.begin()->size() : 0;
    a.reserve(nr * nc);
    for (const auto &row : init)
    {
      if (row.size() != nc)
      {
        throw DimensionError("ragged matrix initializer");
      }
      a.insert(a.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n)
  {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; i++)
    {
      m(i, i) = 1.0;
    }
    return m;
  }

  std::size_t rows() const { return nr; }
  std::size_t cols() const { return nc; }
  double &operator()(std::size_t i, std::size_t j) { return a[i * nc + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * nc + j]; }
  std::span<const double> row(std::size_t i) const
  {
    return std::span<const double>(a).subspan(i * nc, nc);
  }

  bool is_symmetric() const
  {
    if (nr != nc)
    {
      return false;
    }
    for (std::size_t i = 0; i < nr; i++)
    {
      for (std::size_t j = i + 1; j < nc; j++)
      {
        if ((*this)(i, j) != (*this)(j, i))
        {
          return false;
        }
      }
    }
    return true;
  }

  Matrix &operator+=(const Matrix &o)
  {
    check_same(o);
    for (std::size_t k = 0; k < a.size(); k++)
    {
      a[k] += o.a[k];
    }
    return *this;
  }
  Matrix &operator-=(const Matrix &o)
  {
    check_same(o);
    for (std::size_t k = 0; k < a.size(); k++)
    {
      a[k] -= o.a[k];
    }
    return *this;
  }
  Matrix &operator*=(double s)
  {
    for (auto &x : a)
    {
      x *= s;
    }
    return *this;
  }
  friend Matrix operator+(Matrix x, const Matrix &y) { return x += y; }
  friend Matrix operator-(Matrix x, const Matrix &y) { return x -= y; }
  friend Matrix operator*(double s, Matrix x) { return x *= s; }

  friend Matrix operator*(const Matrix &x, const Matrix &y)
  {
    if (x.nc != y.nr)
    {
      throw DimensionError("matmul: dimension mismatch");
    }
    Matrix r(x.nr, y.nc);
    for (std::size_t i = 0; i < x.nr; i++)
    {
      for (std::size_t k = 0; k < x.nc; k++)
      {
        const double xik = x(i, k);
        if (xik == 0.0)
        {
          continue;
        }
        for (std::size_t j = 0; j < y.nc; j++)
        {
          r(i, j) += xik * y(k, j);
        }
      }
    }
    return r;
  }

  friend Vector operator*(const Matrix &x, const Vector &v)
  {
    if (x.nc != v.size())
    {
      throw DimensionError("matvec: dimension mismatch");
    }
    Vector r(x.nr);
    for (std::size_t i = 0; i < x.nr; i++)
    {
      double s = 0.0;
      for (std::size_t j = 0; j < x.nc; j++)
      {
        s += x(i, j) * v[j];
      }
      r[i] = s;
    }
    return r;
  }

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  void check_same(const Matrix &o) const
  {
    if (o.nr != nr || o.nc != nc)
    {
      throw DimensionError("matrix dimension mismatch");
    }
  }

  std::size_t nr = 0, nc = 0;
  std::vector<double> a;
};

//
// Square matrix with entries[i][j] == entries[j][i] exactly.
//
class SymMatrix
{
public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m) : m(std::move(m))
  {
    if (!this->m.is_symmetric())
    {
      throw NotSymmetricError();
    }
    check_finite();
  }

  // Averages m with its transpose; use for products of symmetric matrices that are
  // symmetric only up to rounding.
  static SymMatrix symmetrize(const Matrix &m)
  {
    if (m.rows() != m.cols())
    {
      throw NotSymmetricError();
    }
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); i++)
    {
      s(i, i) = m(i, i);
      for (std::size_t j = i + 1; j < m.cols(); j++)
      {
        s(i, j) = s(j, i) = 0.5 * (m(i, j) + m(j, i));
      }
    }
    return SymMatrix(std::move(s));
  }

  std::size_t size() const { return m.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m(i, j); }
  const Matrix &matrix() const { return m; }

private:
  void check_finite() const
  {
    for (std::size_t i = 0; i < m.rows(); i++)
    {
      for (double x : m.row(i))
      {
        if (!std::isfinite(x))
        {
          throw Error("matrix has non-finite entries");
        }
      }
    }
  }

  Matrix m;
};

//
// Symmetric positive definite matrix with its cached lower Cholesky factor.
//
class PDMatrix
{
public:
  PDMatrix() = default;
  explicit PDMatrix(SymMatrix a) : base(std::move(a)), factor(base.size(), base.size())
  {
    const std::size_t n = base.size();
    for (std::size_t j = 0; j < n; j++)
    {
      double d = base(j, j);
      for (std::size_t k = 0; k < j; k++)
      {
        d -= factor(j, k) * factor(j, k);
      }
      if (!(d > 0.0))
      {
        throw NotPositiveDefiniteError();
      }
      const double ljj = std::sqrt(d);
      factor(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; i++)
      {
        double s = base(i, j);
        for (std::size_t k = 0; k < j; k++)
        {
          s -= factor(i, k) * factor(j, k);
        }
        factor(i, j) = s / ljj;
      }
    }
  }

  std::size_t size() const { return base.size(); }
  const SymMatrix &sym() const { return base; }
  const Matrix &matrix() const { return base.matrix(); }
  const Matrix &cholesky_factor() const { return factor; }

private:
  SymMatrix base;
  Matrix factor;
};

// Solves A x = b with the cached Cholesky factor.
inline Vector pd_solve(const PDMatrix &a, const Vector &b)
{
  const std::size_t n = a.size();
  if (b.size() != n)
  {
    throw DimensionError("pd_solve: dimension mismatch");
  }
  const Matrix &l = a.cholesky_factor();
  Vector y(n);
  for (std::size_t i = 0; i < n; i++)
  {
    double s = b[i];
    for (std::size_t k = 0; k < i; k++)
    {
      s -= l(i, k) * y[k];
    }
    y[i] = s / l(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;)
  {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; k++)
    {
      s -= l(k, ii) * x[k];
    }
    x[ii] = s / l(ii, ii);
  }
  return x;
}

//
// All eigenvalues of a symmetric matrix, sorted descending. Cyclic Jacobi rotations
// with the usual threshold strategy for the first sweeps.
//
inline std::vector<double> sym_eigenvalues(const SymMatrix &s)
{
  const std::size_t n = s.size();
  Matrix a = s.matrix();
  std::vector<double> d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; i++)
  {
    d[i] = b[i] = a(i, i);
  }

  for (int sweep = 0; sweep < 100; sweep++)
  {
    double off = 0.0;
    for (std::size_t p = 0; p < n; p++)
    {
      for (std::size_t q = p + 1; q < n; q++)
      {
        off += std::abs(a(p, q));
      }
    }
    if (off == 0.0)
    {
      break;
    }
    const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p < n; p++)
    {
      for (std::size_t q = p + 1; q < n; q++)
      {
        const double g = 100.0 * std::abs(a(p, q));
        if (sweep > 3 && std::abs(d[p]) + g == std::abs(d[p]) &&
            std::abs(d[q]) + g == std::abs(d[q]))
        {
          a(p, q) = 0.0;
          continue;
        }
        if (std::abs(a(p, q)) <= thresh)
        {
          continue;
        }
        const double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g == std::abs(h))
        {
          t = a(p, q) / h;
        }
        else
        {
          const double theta = 0.5 * h / a(p, q);
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0)
          {
            t = -t;
          }
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);
        const double hh = t * a(p, q);
        z[p] -= hh;
        z[q] += hh;
        d[p] -= hh;
        d[q] += hh;
        a(p, q) = 0.0;
        auto rotate = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l)
        {
          const double gg = a(i, j);
          const double hv = a(k, l);
          a(i, j) = gg - sn * (hv + gg * tau);
          a(k, l) = hv + sn * (gg - hv * tau);
        };
        // Upper triangle only.
        for (std::size_t j = 0; j < p; j++)
        {
          rotate(j, p, j, q);
        }
        for (std::size_t j = p + 1; j < q; j++)
        {
          rotate(p, j, j, q);
        }
        for (std::size_t j = q + 1; j < n; j++)
        {
          rotate(p, j, q, j);
        }
      }
    }
    for (std::size_t p = 0; p < n; p++)
    {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0.0;
    }
  }
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

inline std::vector<double> sym_eigenvalues(const Matrix &a)
{
  return sym_eigenvalues(SymMatrix(a));
}

// ||x||_A = sqrt(x^T A x)
inline double weighted_norm(const Vector &x, const PDMatrix &a)
{
  if (x.size() != a.size())
  {
    throw DimensionError("weighted_norm: dimension mismatch");
  }
  return std::sqrt(std::max(0.0, dot(x, a.matrix() * x)));
}

// ||x||_{A^{-1}}, via one solve.
inline double inv_weighted_norm(const Vector &x, const PDMatrix &a)
{
  return std::sqrt(std::max(0.0, dot(x, pd_solve(a, x))));
}

}  // namespace maoplb
