#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace orbitflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared across the library. All thresholds are relative
/// to max(1, norm of the operand) unless noted otherwise.
struct Tolerances {
  double algebra = 1e-10;      ///< structural checks: Hermiticity, tracelessness
  double unitary = 1e-9;       ///< unitarity and determinant drift
  double spectral_gap = 1e-8;  ///< minimal eigenvalue separation for a simple spectrum
  double singular = 1e-8;      ///< relative spectral-gap test on the Gramian
  double witness = 1e-8;       ///< residual bound accepted for a singularity witness
  double tangent = 1e-8;       ///< relative diagonal mass allowed in a tangent vector
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline bool is_square(const Matrix& a) { return a.rows() == a.cols() && a.rows() >= 1; }

inline bool is_hermitian(const Matrix& a, double tol = 1e-10) {
  return is_square(a) && (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

inline bool is_skew_hermitian(const Matrix& a, double tol = 1e-10) {
  return is_square(a) && (a + a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

inline bool is_traceless(const Matrix& a, double tol = 1e-10) {
  return std::abs(a.trace()) <= tol * std::max(1.0, a.norm());
}

inline bool is_special_unitary(const Matrix& a, double tol = 1e-9) {
  if (!is_square(a)) return false;
  const Eigen::Index n = a.rows();
  const double unitarity = (a.adjoint() * a - Matrix::Identity(n, n)).norm();
  const double det = std::abs(a.determinant() - Complex(1.0, 0.0));
  return unitarity <= tol && det <= tol;
}

/// Symmetrizes away the roundoff drift of a nominally Hermitian matrix.
inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace orbitflow
