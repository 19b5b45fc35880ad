#pragma once

#include <vector>

#include "orbitflow/algebra.hpp"

namespace orbitflow {

/// Problem data: drift and control generators in su(n), the initial state,
/// the observable, and the horizon. The two flags are filled by
/// validate_problem and record whether the simple-spectrum assumption and the
/// Lie-algebra rank condition hold.
struct QuantumProblem {
  Matrix H0, H1;     ///< skew-Hermitian, traceless
  Matrix rho0;       ///< Hermitian initial state
  Matrix theta;      ///< Hermitian observable
  double horizon = 1.0;

  bool simple_spectra = false;  ///< rho0 and theta both have simple eigenvalues
  bool controllable = false;    ///< {H0, H1} generate su(n)

  int n() const { return static_cast<int>(rho0.rows()); }
};

namespace detail {

inline RealVector real_vectorize(const Matrix& m) {
  const Eigen::Index n2 = m.size();
  RealVector v(2 * n2);
  for (Eigen::Index i = 0; i < n2; ++i) {
    v(2 * i) = m(i / m.cols(), i % m.cols()).real();
    v(2 * i + 1) = m(i / m.cols(), i % m.cols()).imag();
  }
  return v;
}

inline Matrix real_unvectorize(const RealVector& v, Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i)
    m(i / n, i % n) = Complex(v(2 * i), v(2 * i + 1));
  return m;
}

inline int numerical_rank(const RealMatrix& a, double rel_tol) {
  if (a.cols() == 0) return 0;
  Eigen::JacobiSVD<RealMatrix> svd(a);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

}  // namespace detail

/// Lie-algebra rank condition: closes {H0, H1} under commutators, tracking the
/// real-linear span via the rank (SVD, relative threshold) of the vectorized
/// matrices. True iff the span reaches dim su(n) = n^2 - 1.
inline bool check_controllability(const Matrix& h0, const Matrix& h1, double rank_tol = 1e-10) {
  require(is_square(h0) && h0.rows() == h1.rows() && h0.cols() == h1.cols(),
          "check_controllability: dimension mismatch");
  require(is_skew_hermitian(h0, 1e-8) && is_traceless(h0, 1e-8),
          "check_controllability: H0 is not in su(n)");
  require(is_skew_hermitian(h1, 1e-8) && is_traceless(h1, 1e-8),
          "check_controllability: H1 is not in su(n)");
  const Eigen::Index n = h0.rows();
  const int full = static_cast<int>(n * n - 1);

  std::vector<RealVector> cols;
  for (const Matrix* g : {&h0, &h1}) {
    const double norm = g->norm();
    if (norm > 1e-14) cols.push_back(detail::real_vectorize(*g / norm));
  }
  if (cols.empty()) return false;

  auto stack = [&]() {
    RealMatrix a(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = cols[j];
    return a;
  };

  int rank = detail::numerical_rank(stack(), rank_tol);
  while (rank < full) {
    // orthonormal basis of the current span, as matrices
    Eigen::JacobiSVD<RealMatrix> svd(stack(), Eigen::ComputeThinU);
    std::vector<Matrix> basis;
    for (int j = 0; j < rank; ++j)
      basis.push_back(detail::real_unvectorize(svd.matrixU().col(j), n));
    for (size_t a = 0; a < basis.size(); ++a)
      for (size_t b = a + 1; b < basis.size(); ++b) {
        const Matrix br = commutator(basis[a], basis[b]);
        const double norm = br.norm();
        if (norm > 1e-13) cols.push_back(detail::real_vectorize(br / norm));
      }
    const int next = detail::numerical_rank(stack(), rank_tol);
    if (next == rank) break;
    rank = next;
  }
  return rank >= full;
}

/// Checks the structural invariants of a problem (throws on violation) and
/// fills the simple-spectra and controllability flags.
inline void validate_problem(QuantumProblem& pb, const Tolerances& tol = {}) {
  require(pb.n() >= 2, "problem: dimension must be at least 2");
  require(is_square(pb.rho0), "problem: rho0 must be square");
  for (const Matrix* m : {&pb.H0, &pb.H1, &pb.theta})
    require(m->rows() == pb.rho0.rows() && m->cols() == pb.rho0.cols(),
            "problem: all matrices must share one dimension");
  require(pb.H0.allFinite() && pb.H1.allFinite() && pb.rho0.allFinite() && pb.theta.allFinite(),
          "problem: matrices must be finite");
  require(is_skew_hermitian(pb.H0, tol.algebra) && is_traceless(pb.H0, tol.algebra),
          "problem: H0 must be skew-Hermitian and traceless");
  require(is_skew_hermitian(pb.H1, tol.algebra) && is_traceless(pb.H1, tol.algebra),
          "problem: H1 must be skew-Hermitian and traceless");
  require(is_hermitian(pb.rho0, tol.algebra), "problem: rho0 must be Hermitian");
  require(is_hermitian(pb.theta, tol.algebra), "problem: theta must be Hermitian");
  require(pb.horizon > 0.0, "problem: horizon must be positive");

  const double rho_gap = hermitian_frame(pb.rho0, tol.algebra).min_gap();
  const double theta_gap = hermitian_frame(pb.theta, tol.algebra).min_gap();
  pb.simple_spectra = rho_gap >= tol.spectral_gap && theta_gap >= tol.spectral_gap;
  pb.controllable = check_controllability(pb.H0, pb.H1);
}

}  // namespace orbitflow
