#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "orbitflow/types.hpp"

namespace orbitflow {

/// Piecewise-constant real control on a uniform grid over [0, horizon]:
/// value k holds on [t_k, t_{k+1}) with t_k = k * horizon / M.
struct ControlSignal {
  double horizon = 1.0;
  std::vector<double> values;

  int subintervals() const { return static_cast<int>(values.size()); }
  double dt() const { return horizon / subintervals(); }
  double node_time(int k) const { return k * dt(); }
  double midpoint_time(int k) const { return (k + 0.5) * dt(); }

  double squared_l2() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return dt() * s;
  }
  double l2_norm() const { return std::sqrt(squared_l2()); }

  void validate() const {
    require(horizon > 0.0, "ControlSignal: horizon must be positive");
    require(!values.empty(), "ControlSignal: at least one subinterval required");
    for (double v : values)
      require(std::isfinite(v), "ControlSignal: values must be finite");
  }

  static ControlSignal zero(double horizon, int subintervals) {
    return {horizon, std::vector<double>(static_cast<size_t>(subintervals), 0.0)};
  }

  static ControlSignal constant(double horizon, int subintervals, double value) {
    return {horizon, std::vector<double>(static_cast<size_t>(subintervals), value)};
  }

  /// Samples a continuous-time control at subinterval midpoints.
  static ControlSignal sampled(double horizon, int subintervals,
                               const std::function<double(double)>& f) {
    ControlSignal u = zero(horizon, subintervals);
    for (int k = 0; k < subintervals; ++k) u.values[k] = f(u.midpoint_time(k));
    return u;
  }
};

inline bool same_grid(const ControlSignal& a, const ControlSignal& b) {
  return a.values.size() == b.values.size() &&
         std::abs(a.horizon - b.horizon) <= 1e-12 * std::max(1.0, a.horizon);
}

/// L2 inner product of two signals on the same grid.
inline double inner(const ControlSignal& a, const ControlSignal& b) {
  require(same_grid(a, b), "inner: control grids do not match");
  double s = 0.0;
  for (size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
  return a.dt() * s;
}

/// y + alpha * x on a shared grid.
inline ControlSignal axpy(double alpha, const ControlSignal& x, const ControlSignal& y) {
  require(same_grid(x, y), "axpy: control grids do not match");
  ControlSignal r = y;
  for (size_t k = 0; k < r.values.size(); ++k) r.values[k] += alpha * x.values[k];
  return r;
}

}  // namespace orbitflow
