#pragma once

#include <optional>
#include <vector>

#include "orbitflow/dynamics.hpp"
#include "orbitflow/objective.hpp"

namespace orbitflow {

/// Switching function sampled at the subinterval midpoints of a control grid.
/// Realizes the adjoint of the end-point differential: pairing it with a
/// direction v in L2 equals the metric pairing of the underlying tangent
/// vector with dEnd(u)v.
struct SwitchingFunction {
  double horizon = 1.0;
  std::vector<double> samples;

  int size() const { return static_cast<int>(samples.size()); }
  double dt() const { return horizon / size(); }
  double squared_l2() const {
    double s = 0.0;
    for (double p : samples) s += p * p;
    return dt() * s;
  }
  double l2_norm() const { return std::sqrt(squared_l2()); }
  ControlSignal as_control() const { return {horizon, samples}; }
};

/// Off-diagonal representative Omega0 of a tangent vector z at the terminal
/// state, transported back to the initial frame: z = Ad_{U(T)} ad_{rho0} Omega0.
inline Matrix pullback_representative(const PropagationRecord& rec, const OrbitSplitting& split,
                                      const TangentVector& z, const Tolerances& tol = {}) {
  require((z.rho - rec.rho_T).norm() <= 1e-8 * std::max(1.0, rec.rho_T.norm()),
          "switching_function: z is not based at the record's terminal state");
  const Matrix& U = rec.terminal();
  const Matrix pulled = U.adjoint() * z.y * U;
  return ad_inverse(split.V, split.lambda, pulled, tol);
}

/// Switching function of a tangent vector z at rho(T):
///   Phi(t) = tr(Omega0 U†(t) H1 U(t)),  z = Ad_{U(T)} ad_{rho0} Omega0,
/// sampled at subinterval midpoints.
inline SwitchingFunction switching_function(const QuantumProblem& pb,
                                            const PropagationRecord& rec,
                                            const OrbitSplitting& split, const TangentVector& z,
                                            const Tolerances& tol = {}) {
  const Matrix omega0 = pullback_representative(rec, split, z, tol);
  SwitchingFunction phi;
  phi.horizon = rec.horizon;
  phi.samples.resize(static_cast<size_t>(rec.subintervals()));
  for (int k = 0; k < rec.subintervals(); ++k) {
    const Matrix x = rec.mid[static_cast<size_t>(k)].adjoint() * pb.H1 * rec.mid[static_cast<size_t>(k)];
    phi.samples[static_cast<size_t>(k)] = (omega0 * x).trace().real();
  }
  return phi;
}

inline SwitchingFunction switching_function(const QuantumProblem& pb,
                                            const PropagationRecord& rec, const TangentVector& z,
                                            const Tolerances& tol = {}) {
  return switching_function(pb, rec, build_splitting(pb.rho0, tol), z, tol);
}

/// Adjoint of the end-point differential applied to z, returned on the control
/// grid.
inline ControlSignal adjoint_differential(const QuantumProblem& pb, const PropagationRecord& rec,
                                          const OrbitSplitting& split, const TangentVector& z,
                                          const Tolerances& tol = {}) {
  return switching_function(pb, rec, split, z, tol).as_control();
}

inline ControlSignal adjoint_differential(const QuantumProblem& pb, const PropagationRecord& rec,
                                          const TangentVector& z, const Tolerances& tol = {}) {
  return adjoint_differential(pb, rec, build_splitting(pb.rho0, tol), z, tol);
}

/// Sample matrix of the canonical tangent basis: S(k, j) is the switching
/// sample of z_j = Ad_{U(T)} ad_{rho0} E_j at the k-th midpoint, which reduces
/// to tr(E_j U†(t_k) H1 U(t_k)) because E_j is its own representative.
inline RealMatrix switching_samples(const QuantumProblem& pb, const PropagationRecord& rec,
                                    const OrbitSplitting& split) {
  const int m = rec.subintervals();
  const int N = split.dim_p;
  std::vector<Matrix> basis;
  basis.reserve(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j) basis.push_back(split.p_basis(j));
  RealMatrix s(m, N);
  for (int k = 0; k < m; ++k) {
    const Matrix x = rec.mid[static_cast<size_t>(k)].adjoint() * pb.H1 * rec.mid[static_cast<size_t>(k)];
    for (int j = 0; j < N; ++j) s(k, j) = (basis[static_cast<size_t>(j)] * x).trace().real();
  }
  return s;
}

/// Controllability Gramian in the canonical metric-orthonormal tangent basis
/// at rho(T): G = dt S^T S, with eigenvalues cached ascending. Positive
/// semidefinite by construction; positive definite exactly when the control is
/// regular.
struct GramianMatrix {
  RealMatrix G;
  RealVector eigenvalues;  ///< ascending

  int dim() const { return static_cast<int>(G.rows()); }
  double min_eigenvalue() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }
  double max_eigenvalue() const {
    return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0;
  }
  double eigen_ratio() const {
    const double mx = max_eigenvalue();
    return mx > 0.0 ? min_eigenvalue() / mx : 0.0;
  }
};

inline GramianMatrix gramian(const QuantumProblem& pb, const PropagationRecord& rec,
                             const OrbitSplitting& split) {
  const RealMatrix s = switching_samples(pb, rec, split);
  GramianMatrix g;
  g.G = rec.dt() * (s.transpose() * s);
  g.G = 0.5 * (g.G + g.G.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g.G);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gramian: eigensolver did not converge");
  g.eigenvalues = es.eigenvalues();
  return g;
}

/// Regular/singular classification by a relative spectral-gap test on the
/// Gramian. Exact rank is meaningless in floating point, so eigenvalues below
/// eps_sing * lambda_max count toward the co-rank; raw eigenvalues stay
/// available in the Gramian for reporting.
struct ControlClassification {
  bool regular = false;
  int corank = 0;  ///< 0 when regular
  double eigen_ratio = 0.0;
};

inline ControlClassification classify_control(const GramianMatrix& g, double eps_sing = 1e-8) {
  ControlClassification c;
  c.eigen_ratio = g.eigen_ratio();
  const double mx = g.max_eigenvalue();
  if (mx <= std::numeric_limits<double>::min()) {
    c.corank = g.dim();
    c.regular = false;
    return c;
  }
  for (Eigen::Index i = 0; i < g.eigenvalues.size(); ++i)
    if (g.eigenvalues(i) < eps_sing * mx) ++c.corank;
  c.regular = c.corank == 0;
  return c;
}

/// Least-squares witness of singularity: the unit-norm Omega0 in the
/// off-diagonal space minimizing the switching samples
/// sum_k tr(Omega0 U†(t_k) H1 U(t_k))^2, i.e. the smallest right singular
/// vector of the sample matrix. Returned when the residual (smallest singular
/// value) is below the witness tolerance.
inline std::optional<Matrix> singularity_witness(const QuantumProblem& pb,
                                                 const PropagationRecord& rec,
                                                 const OrbitSplitting& split,
                                                 const Tolerances& tol = {},
                                                 double* residual_out = nullptr) {
  const RealMatrix s = switching_samples(pb, rec, split);
  Eigen::JacobiSVD<RealMatrix> svd(s, Eigen::ComputeThinV);
  const Eigen::Index last = svd.singularValues().size() - 1;
  const double residual = svd.singularValues()(last);
  if (residual_out) *residual_out = residual;
  if (residual >= tol.witness) return std::nullopt;
  const RealVector a = svd.matrixV().col(last);
  Matrix omega0 = Matrix::Zero(pb.n(), pb.n());
  for (int j = 0; j < split.dim_p; ++j) omega0 += Complex(a(j), 0.0) * split.p_basis(j);
  return omega0;
}

}  // namespace orbitflow
