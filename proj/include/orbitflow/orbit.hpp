#pragma once

#include <vector>

#include "orbitflow/algebra.hpp"

namespace orbitflow {

/// Splitting of su(n) induced by the eigenbasis of a Hermitian matrix with
/// simple spectrum: the commutant direction (imaginary diagonal, dimension
/// n-1) and its Hilbert-Schmidt orthocomplement (off-diagonal, dimension
/// N = n^2 - n). The latter parameterizes the tangent space of the
/// isospectral orbit.
struct OrbitSplitting {
  Matrix V;           ///< eigenbasis, eigenvalues descending
  RealVector lambda;  ///< descending, pairwise gaps >= spectral_gap
  int dim_h = 0;      ///< n - 1
  int dim_p = 0;      ///< N = n^2 - n

  int n() const { return static_cast<int>(lambda.size()); }

  /// Canonical orthonormal basis of the off-diagonal space in the ambient
  /// frame: for each pair j<k the elements (E_jk - E_kj)/sqrt(2) and
  /// i(E_jk + E_kj)/sqrt(2), conjugated by V, pairs ordered lexicographically.
  Matrix p_basis(int idx) const {
    require(idx >= 0 && idx < dim_p, "p_basis: index out of range");
    const int nn = n();
    const int pair = idx / 2;
    const int kind = idx % 2;
    int q = pair, row = 0, col = 1;
    for (int a = 0; a < nn; ++a) {
      const int in_row = nn - 1 - a;
      if (q < in_row) {
        row = a;
        col = a + 1 + q;
        break;
      }
      q -= in_row;
    }
    Matrix e = Matrix::Zero(nn, nn);
    const double r = 1.0 / std::sqrt(2.0);
    if (kind == 0) {
      e(row, col) = Complex(r, 0.0);
      e(col, row) = Complex(-r, 0.0);
    } else {
      e(row, col) = Complex(0.0, r);
      e(col, row) = Complex(0.0, r);
    }
    return V * e * V.adjoint();
  }
};

/// Builds the splitting from rho0. Throws when the spectrum is not simple at
/// the configured gap tolerance.
inline OrbitSplitting build_splitting(const Matrix& rho0, const Tolerances& tol = {}) {
  require(rho0.rows() >= 2, "build_splitting: dimension must be at least 2");
  require(is_hermitian(rho0, tol.algebra), "build_splitting: input is not Hermitian");
  EigenFrame f = hermitian_frame(rho0, tol.algebra);
  if (f.min_gap() < tol.spectral_gap)
    throw std::invalid_argument(
        "build_splitting: eigenvalue gap below tolerance; simple spectrum required");
  OrbitSplitting s;
  s.V = std::move(f.V);
  s.lambda = std::move(f.lambda);
  const int nn = s.n();
  s.dim_h = nn - 1;
  s.dim_p = nn * nn - nn;
  return s;
}

/// Projects omega onto the transported off-diagonal space Ad_U(p): conjugate
/// into the eigenframe carried by U, zero the diagonal, conjugate back.
/// Idempotent and self-adjoint for the Hilbert-Schmidt product.
inline Matrix project_p(const Matrix& omega, const OrbitSplitting& split, const Matrix& u) {
  const Matrix frame = u * split.V;
  Matrix w = frame.adjoint() * omega * frame;
  w.diagonal().setZero();
  return frame * w * frame.adjoint();
}

/// Tangent vector of the isospectral orbit at a base point: a traceless
/// Hermitian matrix with zero diagonal in the base point's eigenframe.
struct TangentVector {
  Matrix rho;  ///< base point
  Matrix y;
};

/// Solves [rho, Omega] = y for the off-diagonal representative Omega, given
/// rho's eigenframe: entrywise Omega_jk = y_jk / (lambda_j - lambda_k).
/// Throws when y has diagonal mass beyond tolerance (not tangent) or the
/// spectrum is too clustered to invert.
inline Matrix ad_inverse(const Matrix& V, const RealVector& lambda, const Matrix& y,
                         const Tolerances& tol = {}) {
  const Eigen::Index n = lambda.size();
  Matrix w = V.adjoint() * y * V;
  const double scale = std::max(1.0, w.norm());
  if (w.diagonal().norm() > tol.tangent * scale)
    throw std::invalid_argument("ad_inverse: vector is not tangent at the base point");
  Matrix omega = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) continue;
      const double gap = lambda(j) - lambda(k);
      if (std::abs(gap) < tol.spectral_gap)
        throw std::invalid_argument("ad_inverse: eigenvalue gap below tolerance");
      omega(j, k) = w(j, k) / gap;
    }
  return V * omega * V.adjoint();
}

/// Invariant metric on the orbit, evaluated entrywise in the eigenframe of
/// rho: <y1, y2> = sum_{j != k} conj(y1)_jk (y2)_jk / (lambda_j - lambda_k)^2.
/// This inverts ad_rho on the off-diagonal space, realizing the pairing
/// tr(Omega1† Omega2) of the representatives.
inline double metric(const EigenFrame& frame, const Matrix& y1, const Matrix& y2,
                     const Tolerances& tol = {}) {
  const Eigen::Index n = frame.lambda.size();
  const Matrix a = frame.V.adjoint() * y1 * frame.V;
  const Matrix b = frame.V.adjoint() * y2 * frame.V;
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) continue;
      const double gap = frame.lambda(j) - frame.lambda(k);
      if (std::abs(gap) < tol.spectral_gap)
        throw std::invalid_argument("metric: eigenvalue gap below tolerance");
      s += (std::conj(a(j, k)) * b(j, k)).real() / (gap * gap);
    }
  return s;
}

inline double metric(const Matrix& rho, const Matrix& y1, const Matrix& y2,
                     const Tolerances& tol = {}) {
  return metric(hermitian_frame(rho, tol.algebra), y1, y2, tol);
}

inline double metric(const TangentVector& a, const TangentVector& b, const Tolerances& tol = {}) {
  require((a.rho - b.rho).norm() <= 1e-9 * std::max(1.0, a.rho.norm()),
          "metric: tangent vectors have different base points");
  return metric(a.rho, a.y, b.y, tol);
}

}  // namespace orbitflow
