#pragma once

#include <vector>

#include "orbitflow/control.hpp"
#include "orbitflow/orbit.hpp"
#include "orbitflow/problem.hpp"

namespace orbitflow {

/// Propagators along a piecewise-constant control: U at every grid node and at
/// every subinterval midpoint, plus the terminal state. Immutable after
/// construction.
struct PropagationRecord {
  double horizon = 1.0;
  Matrix rho0;
  std::vector<Matrix> node;  ///< U(t_k), k = 0..M, node[0] = I
  std::vector<Matrix> mid;   ///< U(t_k + dt/2), k = 0..M-1
  Matrix rho_T;              ///< terminal state U(T) rho0 U(T)†

  int subintervals() const { return static_cast<int>(mid.size()); }
  double dt() const { return horizon / subintervals(); }
  const Matrix& terminal() const { return node.back(); }
  Matrix state_at_node(int k) const { return hermitize(node[k] * rho0 * node[k].adjoint()); }
  Matrix state_at_mid(int k) const { return hermitize(mid[k] * rho0 * mid[k].adjoint()); }
};

/// Solves the propagator equation with one exact exponential per subinterval:
/// U_{k+1} = exp(dt (H0 + u_k H1)) U_k. Midpoint propagators come from the
/// half-step exponential of the same generator.
inline PropagationRecord propagate(const QuantumProblem& pb, const ControlSignal& u) {
  u.validate();
  require(std::abs(u.horizon - pb.horizon) <= 1e-12 * std::max(1.0, pb.horizon),
          "propagate: control horizon does not match the problem");
  const int m = u.subintervals();
  const double dt = u.dt();
  PropagationRecord rec;
  rec.horizon = pb.horizon;
  rec.rho0 = pb.rho0;
  rec.node.reserve(static_cast<size_t>(m) + 1);
  rec.mid.reserve(static_cast<size_t>(m));
  Matrix U = Matrix::Identity(pb.n(), pb.n());
  rec.node.push_back(U);
  for (int k = 0; k < m; ++k) {
    const SkewExponential ex(pb.H0 + u.values[static_cast<size_t>(k)] * pb.H1);
    rec.mid.push_back(ex.at(0.5 * dt) * U);
    U = ex.at(dt) * U;
    rec.node.push_back(U);
  }
  rec.rho_T = hermitize(U * pb.rho0 * U.adjoint());
  return rec;
}

/// Differential of the end-point map by quadrature of the variation-of-
/// constants formula: y(T) = U(T) [ integral of [U†(s) H1 U(s), rho0] v(s) ds ]
/// U(T)†, midpoint rule per subinterval.
inline TangentVector first_variation(const QuantumProblem& pb, const PropagationRecord& rec,
                                     const ControlSignal& v) {
  require(v.subintervals() == rec.subintervals() &&
              std::abs(v.horizon - rec.horizon) <= 1e-12 * std::max(1.0, rec.horizon),
          "first_variation: direction grid does not match the record");
  const int m = rec.subintervals();
  const double dt = rec.dt();
  Matrix z = Matrix::Zero(pb.n(), pb.n());
  for (int k = 0; k < m; ++k) {
    const Matrix x = rec.mid[k].adjoint() * pb.H1 * rec.mid[k];
    z += (dt * v.values[static_cast<size_t>(k)]) * commutator(x, pb.rho0);
  }
  const Matrix& U = rec.terminal();
  return {rec.rho_T, hermitize(U * z * U.adjoint())};
}

inline TangentVector first_variation(const QuantumProblem& pb, const ControlSignal& u,
                                     const ControlSignal& v) {
  return first_variation(pb, propagate(pb, u), v);
}

/// Differential of the end-point map by direct integration of the variational
/// equation ydot = [H0 + u H1, y] + v [H1, rho]: exact piecewise-exponential
/// transport of the homogeneous part, midpoint rule for the source.
inline TangentVector first_variation_ode(const QuantumProblem& pb, const PropagationRecord& rec,
                                         const ControlSignal& v) {
  require(v.subintervals() == rec.subintervals() &&
              std::abs(v.horizon - rec.horizon) <= 1e-12 * std::max(1.0, rec.horizon),
          "first_variation_ode: direction grid does not match the record");
  const int m = rec.subintervals();
  const double dt = rec.dt();
  Matrix y = Matrix::Zero(pb.n(), pb.n());
  for (int k = 0; k < m; ++k) {
    const Matrix E = rec.node[static_cast<size_t>(k) + 1] * rec.node[static_cast<size_t>(k)].adjoint();
    const Matrix F = rec.mid[static_cast<size_t>(k)] * rec.node[static_cast<size_t>(k)].adjoint();
    const Matrix src = v.values[static_cast<size_t>(k)] * commutator(pb.H1, rec.state_at_mid(k));
    y = E * y * E.adjoint() + dt * (F * src * F.adjoint());
  }
  return {rec.rho_T, hermitize(y)};
}

inline TangentVector first_variation_ode(const QuantumProblem& pb, const ControlSignal& u,
                                         const ControlSignal& v) {
  return first_variation_ode(pb, propagate(pb, u), v);
}

/// Second derivative of the end-point map along v: integrates
/// rdot = [H0 + u H1, r] + v [H1, y_v] coupled with the first variation. The
/// midpoint value of y_v uses half-step transport with a trapezoidal source.
inline TangentVector second_variation(const QuantumProblem& pb, const PropagationRecord& rec,
                                      const ControlSignal& v) {
  require(v.subintervals() == rec.subintervals() &&
              std::abs(v.horizon - rec.horizon) <= 1e-12 * std::max(1.0, rec.horizon),
          "second_variation: direction grid does not match the record");
  const int m = rec.subintervals();
  const double dt = rec.dt();
  const Eigen::Index n = pb.n();
  Matrix y = Matrix::Zero(n, n);
  Matrix r = Matrix::Zero(n, n);
  for (int k = 0; k < m; ++k) {
    const double vk = v.values[static_cast<size_t>(k)];
    const Matrix E = rec.node[static_cast<size_t>(k) + 1] * rec.node[static_cast<size_t>(k)].adjoint();
    const Matrix F = rec.mid[static_cast<size_t>(k)] * rec.node[static_cast<size_t>(k)].adjoint();
    const Matrix g_node = vk * commutator(pb.H1, rec.state_at_node(k));
    const Matrix g_mid = vk * commutator(pb.H1, rec.state_at_mid(k));
    const Matrix y_mid =
        F * y * F.adjoint() + 0.25 * dt * (F * g_node * F.adjoint() + g_mid);
    r = E * r * E.adjoint() + dt * (F * (vk * commutator(pb.H1, y_mid)) * F.adjoint());
    y = E * y * E.adjoint() + dt * (F * g_mid * F.adjoint());
  }
  return {rec.rho_T, hermitize(r)};
}

inline TangentVector second_variation(const QuantumProblem& pb, const ControlSignal& u,
                                      const ControlSignal& v) {
  return second_variation(pb, propagate(pb, u), v);
}

}  // namespace orbitflow
