#pragma once

// Dense vectors/matrices are plain Eigen types; the free functions below add
// the size checks and the factorization contract the estimators rely on.

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "oqr/errors.hpp"

namespace oqr {

template <typename Scalar> using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;
using Index = Eigen::Index;

namespace detail {
inline void require_same_size(Index a, Index b, char const *what)
{
  if (a != b) {
    throw ConfigError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}
} // namespace detail

template <typename A, typename B>
typename A::Scalar dot(Eigen::MatrixBase<A> const &u, Eigen::MatrixBase<B> const &v)
{
  detail::require_same_size(u.size(), v.size(), "dot");
  return u.dot(v);
}

/// a*u + v, evaluated.
template <typename A, typename B>
Vec<typename A::Scalar>
axpy(typename A::Scalar a, Eigen::MatrixBase<A> const &u, Eigen::MatrixBase<B> const &v)
{
  detail::require_same_size(u.size(), v.size(), "axpy");
  return a * u + v;
}

template <typename A> typename A::Scalar norm2(Eigen::MatrixBase<A> const &u)
{
  return u.norm();
}

template <typename Scalar> struct CholeskyFactor
{
  Mat<Scalar> L;

  Index dim() const { return L.rows(); }
  Mat<Scalar> reconstruct() const { return L * L.transpose(); }

  /// Forward then back substitution for (L L^T) x = b.
  Vec<Scalar> solve(Vec<Scalar> const &b) const
  {
    detail::require_same_size(L.rows(), b.size(), "solve");
    Index const n = L.rows();
    Vec<Scalar> z(n);
    for (Index i = 0; i < n; ++i) {
      Scalar s = b(i);
      for (Index k = 0; k < i; ++k) s -= L(i, k) * z(k);
      z(i) = s / L(i, i);
    }
    Vec<Scalar> x(n);
    for (Index i = n - 1; i >= 0; --i) {
      Scalar s = z(i);
      for (Index k = i + 1; k < n; ++k) s -= L(k, i) * x(k);
      x(i) = s / L(i, i);
    }
    return x;
  }
};

/// Unblocked Cholesky. Rejects asymmetry above 1e-12 (relative to the largest
/// entry) and pivots at or below 1e-12 * max diagonal.
template <typename Derived>
CholeskyFactor<typename Derived::Scalar> cholesky(Eigen::MatrixBase<Derived> const &m)
{
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw ConfigError("cholesky: matrix is not square");
  Index const n = m.rows();
  if (n == 0) throw ConfigError("cholesky: empty matrix");
  if (!m.allFinite()) throw ConfigError("cholesky: non-finite entries");

  Scalar const scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw ConfigError("cholesky: matrix is not symmetric");
  }
  Scalar const pivot_floor = Scalar(1e-12) * m.diagonal().maxCoeff();

  CholeskyFactor<Scalar> f{Mat<Scalar>::Zero(n, n)};
  auto &L = f.L;
  for (Index j = 0; j < n; ++j) {
    Scalar diag = m(j, j);
    for (Index k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > pivot_floor)) {
      throw NotPositiveDefinite("cholesky: non-positive pivot " + std::to_string(diag) +
                                " at column " + std::to_string(j));
    }
    Scalar const ljj = std::sqrt(diag);
    L(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      Scalar s = m(i, j);
      for (Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  return f;
}

template <typename Derived, typename B>
Vec<typename Derived::Scalar> solve_spd(Eigen::MatrixBase<Derived> const &m,
                                        Eigen::MatrixBase<B> const &b)
{
  detail::require_same_size(m.rows(), b.size(), "solve_spd");
  return cholesky(m).solve(b);
}

} // namespace oqr
