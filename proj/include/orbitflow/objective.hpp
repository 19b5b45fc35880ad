#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "orbitflow/orbit.hpp"
#include "orbitflow/problem.hpp"

namespace orbitflow {

/// Orbit cost J(rho) = Re tr(rho theta).
inline double cost(const Matrix& rho, const Matrix& theta) {
  require(is_square(rho) && rho.rows() == theta.rows() && rho.cols() == theta.cols(),
          "cost: dimension mismatch");
  return (rho * theta).trace().real();
}

/// Gradient of the orbit cost in the invariant metric: the double commutator
/// [rho, [rho, theta]]. Vanishes exactly when [rho, theta] = 0.
inline TangentVector grad_J(const Matrix& rho, const Matrix& theta) {
  return {rho, commutator(rho, commutator(rho, theta))};
}

/// One critical point of the orbit cost: rho_c = W diag(lambda[perm]) W† with
/// W the descending eigenbasis of theta and lambda the descending spectrum of
/// rho0.
struct CriticalPoint {
  std::vector<int> permutation;
  Matrix rho_c;
  double value = 0.0;
  RealVector hessian_spectrum;  ///< ascending
  int morse_index = 0;          ///< number of negative Hessian eigenvalues
};

/// Second directional-derivative form of the orbit cost at rho in the
/// canonical orthonormal tangent basis:
///   H_jk = sym Re tr([Omega_j, [Omega_k, rho]] theta).
/// At a critical point ([rho, theta] = 0) this is the Hessian of J, which is
/// connection-independent there.
struct HessianForm {
  RealMatrix H;
  std::vector<Matrix> omegas;  ///< HS-orthonormal off-diagonal representatives
};

inline HessianForm hessian_form(const Matrix& rho, const Matrix& theta,
                                const Tolerances& tol = {}) {
  const OrbitSplitting split = build_splitting(rho, tol);
  const int N = split.dim_p;
  HessianForm hf;
  hf.omegas.reserve(N);
  for (int j = 0; j < N; ++j) hf.omegas.push_back(split.p_basis(j));
  std::vector<Matrix> brackets(N);
  for (int j = 0; j < N; ++j) brackets[j] = commutator(hf.omegas[j], rho);
  hf.H.resize(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= j; ++k) {
      const double hjk = (commutator(hf.omegas[j], brackets[k]) * theta).trace().real();
      const double hkj = (commutator(hf.omegas[k], brackets[j]) * theta).trace().real();
      hf.H(j, k) = hf.H(k, j) = 0.5 * (hjk + hkj);
    }
  return hf;
}

/// Hessian of the orbit cost at an enumerated critical point. Throws when the
/// point does not commute with theta.
inline RealMatrix hessian_J(const CriticalPoint& pt, const QuantumProblem& pb,
                            const Tolerances& tol = {}) {
  const double comm = commutator(pt.rho_c, pb.theta).norm();
  require(comm <= 1e-8 * std::max(1.0, pt.rho_c.norm() * pb.theta.norm()),
          "hessian_J: point is not critical ([rho_c, theta] != 0)");
  return hessian_form(pt.rho_c, pb.theta, tol).H;
}

/// Enumerates all n! critical points of the orbit cost under the
/// simple-spectrum assumption, sorted ascending by value (ties broken by
/// lexicographic permutation order). Each point carries its Hessian spectrum
/// and Morse index.
inline std::vector<CriticalPoint> enumerate_critical_points(const QuantumProblem& pb,
                                                            const Tolerances& tol = {}) {
  const int n = pb.n();
  require(n <= 8, "enumerate_critical_points: n > 8 not supported (factorial growth)");
  const EigenFrame rho_frame = hermitian_frame(pb.rho0, tol.algebra);
  const EigenFrame theta_frame = hermitian_frame(pb.theta, tol.algebra);
  if (rho_frame.min_gap() < tol.spectral_gap || theta_frame.min_gap() < tol.spectral_gap)
    throw std::invalid_argument(
        "enumerate_critical_points: simple spectra required for rho0 and theta");

  const Matrix& W = theta_frame.V;
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<CriticalPoint> points;
  do {
    CriticalPoint pt;
    pt.permutation = perm;
    Eigen::VectorXcd d(n);
    pt.value = 0.0;
    for (int i = 0; i < n; ++i) {
      d(i) = Complex(rho_frame.lambda(perm[static_cast<size_t>(i)]), 0.0);
      pt.value += rho_frame.lambda(perm[static_cast<size_t>(i)]) * theta_frame.lambda(i);
    }
    pt.rho_c = hermitize(W * d.asDiagonal() * W.adjoint());
    const RealMatrix H = hessian_form(pt.rho_c, pb.theta, tol).H;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(H);
    pt.hessian_spectrum = es.eigenvalues();
    pt.morse_index = 0;
    for (Eigen::Index i = 0; i < pt.hessian_spectrum.size(); ++i)
      if (pt.hessian_spectrum(i) < 0.0) ++pt.morse_index;
    points.push_back(std::move(pt));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::sort(points.begin(), points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.permutation < b.permutation;
  });
  return points;
}

/// Sorted-pairing upper bound: the maximal orbit cost sum(lambda_i mu_i) over
/// descending spectra.
inline double max_orbit_cost(const QuantumProblem& pb, const Tolerances& tol = {}) {
  const EigenFrame rf = hermitian_frame(pb.rho0, tol.algebra);
  const EigenFrame tf = hermitian_frame(pb.theta, tol.algebra);
  double s = 0.0;
  for (Eigen::Index i = 0; i < rf.lambda.size(); ++i) s += rf.lambda(i) * tf.lambda(i);
  return s;
}

}  // namespace orbitflow
