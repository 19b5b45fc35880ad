#pragma once

#include <utility>

#include "orbitflow/types.hpp"

namespace orbitflow {

inline Matrix commutator(const Matrix& a, const Matrix& b) {
  require(is_square(a) && a.rows() == b.rows() && a.cols() == b.cols(),
          "commutator: dimension mismatch");
  return a * b - b * a;
}

/// Hilbert-Schmidt inner product Re tr(A†B).
inline double hs_inner(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending.
struct EigenFrame {
  Matrix V;           ///< columns are eigenvectors
  RealVector lambda;  ///< descending

  double min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j + 1 < lambda.size(); ++j)
      g = std::min(g, lambda(j) - lambda(j + 1));
    return g;
  }
};

inline EigenFrame hermitian_frame(const Matrix& rho, double herm_tol = 1e-10) {
  require(is_hermitian(rho, herm_tol), "hermitian_frame: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_frame: eigensolver did not converge");
  const Eigen::Index n = rho.rows();
  EigenFrame f;
  f.V.resize(n, n);
  f.lambda.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    f.V.col(j) = es.eigenvectors().col(n - 1 - j);
    f.lambda(j) = es.eigenvalues()(n - 1 - j);
  }
  return f;
}

/// Exponential factory for a fixed skew-Hermitian generator A: diagonalizes
/// -iA once, after which exp(tau*A) at any tau costs two products. Used by the
/// propagator loop where the same generator is evaluated at full, half and
/// quarter steps.
class SkewExponential {
 public:
  explicit SkewExponential(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0.0, -1.0) * a);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("SkewExponential: eigensolver did not converge (non-normal input?)");
    v_ = es.eigenvectors();
    d_ = es.eigenvalues();
  }

  Matrix at(double tau) const {
    Eigen::VectorXcd phase(d_.size());
    for (Eigen::Index j = 0; j < d_.size(); ++j)
      phase(j) = std::exp(Complex(0.0, tau * d_(j)));
    return v_ * phase.asDiagonal() * v_.adjoint();
  }

 private:
  Matrix v_;
  RealVector d_;
};

/// exp(tA) for skew-Hermitian A, computed by unitary diagonalization of the
/// Hermitian matrix -iA. Exact up to the eigensolver, so unitarity does not
/// drift with t.
inline Matrix expm_skew(const Matrix& a, double t, const Tolerances& tol = {}) {
  require(is_skew_hermitian(a, tol.algebra), "expm_skew: input is not skew-Hermitian");
  return SkewExponential(a).at(t);
}

}  // namespace orbitflow
