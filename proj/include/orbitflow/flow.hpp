#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitflow/endpoint.hpp"
#include "orbitflow/rng.hpp"

namespace orbitflow {

/// Discretization of the gradient flow in control space: explicit Euler in the
/// flow parameter with a backtracking line search that preserves monotone
/// ascent.
struct FlowConfig {
  double eta = 0.5;            ///< initial flow step
  double eta_max = 32.0;       ///< cap for the adaptive step
  double beta = 0.5;           ///< backtracking shrink factor, in (0, 1)
  int max_backtracks = 40;
  int max_iters = 5000;
  double grad_tol = 1e-6;      ///< stop when the L2 gradient norm falls below
  double comm_tol = 1e-6;      ///< kinematic test on ||[rho(T), theta]||_F
  double gap_tol = 1e-4;       ///< distance to the oracle maximum for GlobalMax
  uint64_t seed = 0;           ///< drives the diagnostic probe directions
  int snapshot_interval = 0;   ///< control snapshots every k iterations (0 = off)

  void validate() const {
    require(eta > 0.0 && eta_max >= eta, "FlowConfig: eta must be positive and capped");
    require(beta > 0.0 && beta < 1.0, "FlowConfig: beta must lie in (0, 1)");
    require(grad_tol > 0.0, "FlowConfig: grad_tol must be positive");
    require(max_iters >= 0 && max_backtracks >= 1, "FlowConfig: iteration limits invalid");
  }
};

/// Functional gradient of the cost along the flow, sampled at subinterval
/// midpoints:
///   grad(t) = tr([rho0, U(T)† theta U(T)] U†(t) H1 U(t)).
/// Identical to the switching function of the orbit-cost gradient at rho(T);
/// both code paths are kept and cross-checked in the tests.
inline ControlSignal grad_cost_functional(const QuantumProblem& pb,
                                          const PropagationRecord& rec) {
  const Matrix& U = rec.terminal();
  const Matrix omega0 = commutator(pb.rho0, Matrix(U.adjoint() * pb.theta * U));
  ControlSignal g;
  g.horizon = rec.horizon;
  g.values.resize(static_cast<size_t>(rec.subintervals()));
  for (int k = 0; k < rec.subintervals(); ++k) {
    const Matrix x = rec.mid[static_cast<size_t>(k)].adjoint() * pb.H1 * rec.mid[static_cast<size_t>(k)];
    g.values[static_cast<size_t>(k)] = (omega0 * x).trace().real();
  }
  return g;
}

inline ControlSignal grad_cost_functional(const QuantumProblem& pb, const ControlSignal& u) {
  return grad_cost_functional(pb, propagate(pb, u));
}

/// Mutable line-search state carried across flow steps.
struct StepState {
  double eta = 0.5;
  int streak = 0;  ///< consecutive acceptances without backtracking
};

struct StepOutcome {
  ControlSignal u;
  bool accepted = false;
  double value_before = 0.0;
  double value_after = 0.0;
  double grad_norm = 0.0;
  double eta_used = 0.0;
  int backtracks = 0;
};

namespace detail {

/// Proposes u + eta * grad and backtracks until the cost does not decrease.
/// Grows eta by 1/beta after two clean acceptances, capped at eta_max.
inline StepOutcome try_step(const QuantumProblem& pb, const ControlSignal& u, double value,
                            const ControlSignal& grad, const FlowConfig& cfg, StepState& st) {
  StepOutcome out;
  out.value_before = value;
  out.grad_norm = grad.l2_norm();
  double eta = st.eta;
  for (int b = 0; b < cfg.max_backtracks; ++b) {
    ControlSignal trial = axpy(eta, grad, u);
    const double value_trial = cost(propagate(pb, trial).rho_T, pb.theta);
    if (!std::isfinite(value_trial))
      throw std::runtime_error("flow_step: non-finite cost encountered");
    if (value_trial >= value) {
      out.u = std::move(trial);
      out.accepted = true;
      out.value_after = value_trial;
      out.eta_used = eta;
      out.backtracks = b;
      st.eta = eta;
      if (b == 0) {
        if (++st.streak >= 2) {
          st.eta = std::min(eta / cfg.beta, cfg.eta_max);
          st.streak = 0;
        }
      } else {
        st.streak = 0;
      }
      return out;
    }
    eta *= cfg.beta;
  }
  out.u = u;
  out.accepted = false;
  out.value_after = value;
  out.eta_used = eta;
  out.backtracks = cfg.max_backtracks;
  st.eta = eta;
  st.streak = 0;
  return out;
}

}  // namespace detail

/// One explicit-Euler ascent step with backtracking. At a critical point the
/// proposal equals u and is accepted unchanged.
inline StepOutcome flow_step(const QuantumProblem& pb, const ControlSignal& u,
                             const FlowConfig& cfg, StepState& st) {
  cfg.validate();
  const PropagationRecord rec = propagate(pb, u);
  const double value = cost(rec.rho_T, pb.theta);
  const ControlSignal grad = grad_cost_functional(pb, rec);
  return detail::try_step(pb, u, value, grad, cfg, st);
}

enum class FlowStatus { GlobalMax, Saddle, SuspectedNonKinematic, MaxIters };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::GlobalMax: return "GlobalMax";
    case FlowStatus::Saddle: return "Saddle";
    case FlowStatus::SuspectedNonKinematic: return "SuspectedNonKinematic";
    case FlowStatus::MaxIters: return "MaxIters";
  }
  return "Unknown";
}

struct FlowIterate {
  int iter = 0;
  double s = 0.0;  ///< accumulated flow parameter
  double value = 0.0;
  double grad_norm = 0.0;
  double eta = 0.0;
  bool accepted = false;  ///< whether a step was taken from this iterate
};

struct FlowTrace {
  std::vector<FlowIterate> iterates;
  std::vector<std::pair<int, ControlSignal>> snapshots;
};

struct NearestCritical {
  std::vector<int> permutation;
  double distance = 0.0;
  double value = 0.0;
  int morse_index = -1;
};

/// Final classification of a flow run against the kinematic landscape,
/// including the thresholds used so borderline runs stay auditable.
struct ConvergenceReport {
  FlowStatus status = FlowStatus::MaxIters;
  int iterations = 0;
  double final_value = 0.0;
  double max_value_oracle = 0.0;  ///< sorted-pairing maximum
  double gap = 0.0;               ///< max_value_oracle - final_value
  double final_grad_norm = 0.0;
  double commutator_norm = 0.0;   ///< ||[rho(T), theta]||_F
  std::optional<NearestCritical> nearest;
  int saddle_index = -1;          ///< Morse index when status == Saddle
  double gramian_min = 0.0, gramian_max = 0.0, gramian_ratio = 0.0;
  int gramian_corank = 0;
  double witness_residual = 0.0;
  std::vector<double> hessian_probe;  ///< quadratic form along random directions
  double grad_tol = 0.0, comm_tol = 0.0, gap_tol = 0.0;
  std::vector<std::string> warnings;
};

/// Quadratic form of the cost functional at u along v: the curvature carried
/// through the end-point differential plus the gradient paired with the second
/// variation.
inline double cost_quadratic_form(const QuantumProblem& pb, const PropagationRecord& rec,
                                  const ControlSignal& v, const Tolerances& tol = {}) {
  const TangentVector y = first_variation(pb, rec, v);
  const TangentVector r = second_variation(pb, rec, v);
  const HessianForm hf = hessian_form(rec.rho_T, pb.theta, tol);
  const EigenFrame frame = hermitian_frame(rec.rho_T, tol.algebra);
  const int N = static_cast<int>(hf.omegas.size());
  RealVector c(N);
  for (int j = 0; j < N; ++j)
    c(j) = metric(frame, y.y, commutator(rec.rho_T, hf.omegas[static_cast<size_t>(j)]), tol);
  const double curvature = c.dot(hf.H * c);
  const double grad_pairing = metric(frame, grad_J(rec.rho_T, pb.theta).y, r.y, tol);
  return curvature + grad_pairing;
}

/// Runs the discrete gradient flow from u0 until the gradient norm falls below
/// grad_tol, the step stalls, or max_iters is reached; then classifies the
/// terminal state against the enumerated landscape.
inline std::pair<FlowTrace, ConvergenceReport> run_flow(const QuantumProblem& pb,
                                                        const ControlSignal& u0,
                                                        const FlowConfig& cfg,
                                                        const Tolerances& tol = {}) {
  cfg.validate();
  u0.validate();
  FlowTrace trace;
  ConvergenceReport report;
  report.grad_tol = cfg.grad_tol;
  report.comm_tol = cfg.comm_tol;
  report.gap_tol = cfg.gap_tol;
  if (!pb.controllable)
    report.warnings.push_back("problem failed the Lie-algebra rank condition; the orbit may not be reachable");

  ControlSignal u = u0;
  StepState st{cfg.eta, 0};
  double s_accum = 0.0;
  int iter = 0;
  bool converged = false;
  bool stalled = false;

  PropagationRecord rec = propagate(pb, u);
  double value = cost(rec.rho_T, pb.theta);

  while (true) {
    const ControlSignal grad = grad_cost_functional(pb, rec);
    const double grad_norm = grad.l2_norm();
    if (cfg.snapshot_interval > 0 && iter % cfg.snapshot_interval == 0)
      trace.snapshots.emplace_back(iter, u);
    if (grad_norm < cfg.grad_tol) {
      trace.iterates.push_back({iter, s_accum, value, grad_norm, st.eta, false});
      converged = true;
      if (iter == 0)
        report.warnings.push_back("initial control is already critical (gradient below tolerance)");
      break;
    }
    if (iter >= cfg.max_iters) {
      trace.iterates.push_back({iter, s_accum, value, grad_norm, st.eta, false});
      break;
    }
    const StepOutcome out = detail::try_step(pb, u, value, grad, cfg, st);
    trace.iterates.push_back({iter, s_accum, value, grad_norm, out.eta_used, out.accepted});
    if (!out.accepted) {
      stalled = true;
      report.warnings.push_back("line search stalled before the gradient tolerance was reached");
      break;
    }
    u = out.u;
    value = out.value_after;
    s_accum += out.eta_used;
    rec = propagate(pb, u);
    ++iter;
  }

  report.iterations = iter;
  report.final_value = value;
  report.final_grad_norm = trace.iterates.back().grad_norm;
  report.max_value_oracle = max_orbit_cost(pb, tol);
  report.gap = report.max_value_oracle - value;
  report.commutator_norm = commutator(rec.rho_T, pb.theta).norm();

  const OrbitSplitting split = build_splitting(pb.rho0, tol);
  const GramianMatrix gram = gramian(pb, rec, split);
  const ControlClassification cls = classify_control(gram, tol.singular);
  report.gramian_min = gram.min_eigenvalue();
  report.gramian_max = gram.max_eigenvalue();
  report.gramian_ratio = gram.eigen_ratio();
  report.gramian_corank = cls.corank;
  singularity_witness(pb, rec, split, tol, &report.witness_residual);

  if (pb.n() <= 6) {
    const auto landscape = enumerate_critical_points(pb, tol);
    size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < landscape.size(); ++i) {
      const double d = (rec.rho_T - landscape[i].rho_c).norm();
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    report.nearest = NearestCritical{landscape[best].permutation, best_dist,
                                     landscape[best].value, landscape[best].morse_index};
    if (report.commutator_norm < cfg.comm_tol) {
      const bool at_max = best == landscape.size() - 1;
      if (at_max && report.gap < cfg.gap_tol) {
        report.status = FlowStatus::GlobalMax;
      } else {
        report.status = FlowStatus::Saddle;
        report.saddle_index = landscape[best].morse_index;
      }
      return {std::move(trace), std::move(report)};
    }
  } else {
    report.warnings.push_back("landscape enumeration skipped for n > 6");
    if (report.commutator_norm < cfg.comm_tol) {
      report.status = report.gap < cfg.gap_tol ? FlowStatus::GlobalMax : FlowStatus::Saddle;
      return {std::move(trace), std::move(report)};
    }
  }

  if (converged || stalled) {
    report.status = FlowStatus::SuspectedNonKinematic;
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    for (int probe = 0; probe < 8; ++probe) {
      ControlSignal v = random_uniform_control(u.horizon, u.subintervals(), 1.0, rng);
      const double nv = v.l2_norm();
      if (nv > 0.0)
        for (double& x : v.values) x /= nv;
      report.hessian_probe.push_back(cost_quadratic_form(pb, rec, v, tol));
    }
  } else {
    report.status = FlowStatus::MaxIters;
  }
  return {std::move(trace), std::move(report)};
}

/// Spectrum summary of the cost-functional Hessian at a control near a
/// kinematic critical point: eigenvalues of g H g with g the symmetric square
/// root of the Gramian and H the orbit-cost Hessian form, both expressed in
/// the canonical tangent basis at rho(T). The nonzero spectrum transfers the
/// signature of the orbit Hessian whenever the control is regular.
struct ControlHessianSummary {
  RealVector eigenvalues;  ///< ascending
  int positive = 0;
  int negative = 0;
  bool reliable = false;  ///< false when the Gramian fails the regularity test
  double gramian_ratio = 0.0;
};

inline ControlHessianSummary hessian_at_control(const QuantumProblem& pb, const ControlSignal& u,
                                                const Tolerances& tol = {},
                                                double comm_tol = 1e-6) {
  const PropagationRecord rec = propagate(pb, u);
  const double comm = commutator(rec.rho_T, pb.theta).norm();
  require(comm < comm_tol,
          "hessian_at_control: control is not near a kinematic critical point");
  const HessianForm hf = hessian_form(rec.rho_T, pb.theta, tol);
  const int N = static_cast<int>(hf.omegas.size());
  const OrbitSplitting split0 = build_splitting(pb.rho0, tol);

  // Gramian in the same basis: switching functions of b_j = ad_rho(T) Omega_j.
  RealMatrix s(rec.subintervals(), N);
  for (int j = 0; j < N; ++j) {
    const TangentVector bj{rec.rho_T, commutator(rec.rho_T, hf.omegas[static_cast<size_t>(j)])};
    const SwitchingFunction phi = switching_function(pb, rec, split0, bj, tol);
    for (int k = 0; k < rec.subintervals(); ++k) s(k, j) = phi.samples[static_cast<size_t>(k)];
  }
  RealMatrix G = rec.dt() * (s.transpose() * s);
  G = 0.5 * (G + G.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eg(G);
  if (eg.info() != Eigen::Success)
    throw std::runtime_error("hessian_at_control: Gramian eigensolver failed");
  const double gmax = eg.eigenvalues()(N - 1);
  ControlHessianSummary out;
  out.gramian_ratio = gmax > 0.0 ? eg.eigenvalues()(0) / gmax : 0.0;
  out.reliable = out.gramian_ratio >= tol.singular;

  RealVector sq(N);
  for (int j = 0; j < N; ++j) sq(j) = std::sqrt(std::max(0.0, eg.eigenvalues()(j)));
  const RealMatrix g_half = eg.eigenvectors() * sq.asDiagonal() * eg.eigenvectors().transpose();
  RealMatrix a = g_half * hf.H * g_half;
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> ea(a);
  out.eigenvalues = ea.eigenvalues();
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues(i) > 0.0) ++out.positive;
    if (out.eigenvalues(i) < 0.0) ++out.negative;
  }
  return out;
}

}  // namespace orbitflow
