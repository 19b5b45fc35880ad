#pragma once

#include <cstdint>
#include <random>

#include "orbitflow/algebra.hpp"
#include "orbitflow/control.hpp"

namespace orbitflow {

/// Deterministic random source. Distributions are implemented here rather than
/// taken from <random> so that identical seeds give identical streams on every
/// platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t integer() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via the polar method.
  double gaussian() {
    while (true) {
      const double u = uniform(-1.0, 1.0);
      const double v = uniform(-1.0, 1.0);
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

 private:
  std::mt19937_64 gen_;
};

/// Gaussian draw from su(n): independent complex Gaussian entries projected to
/// the skew-Hermitian traceless part, optionally rescaled to a fixed
/// Frobenius norm.
inline Matrix random_su(int n, Rng& rng, double scale = 1.0, bool normalize = true) {
  Matrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = Complex(rng.gaussian(), rng.gaussian());
  Matrix a = 0.5 * (g - g.adjoint());
  a -= (a.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
  if (normalize) {
    const double norm = a.norm();
    if (norm > 0.0) a *= scale / norm;
  } else {
    a *= scale;
  }
  return a;
}

/// Haar-like random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
inline Matrix random_unitary(int n, Rng& rng) {
  Matrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

/// Hermitian matrix with a prescribed spectrum and a random eigenbasis.
inline Matrix random_hermitian_with_spectrum(const RealVector& spectrum, Rng& rng) {
  const int n = static_cast<int>(spectrum.size());
  const Matrix q = random_unitary(n, rng);
  return hermitize(q * spectrum.cast<Complex>().asDiagonal() * q.adjoint());
}

/// Random tangent vector at rho: the bracket of rho with a random su(n)
/// element.
inline Matrix random_tangent(const Matrix& rho, Rng& rng) {
  Matrix omega = random_su(static_cast<int>(rho.rows()), rng);
  return rho * omega - omega * rho;
}

inline ControlSignal random_uniform_control(double horizon, int subintervals, double amplitude,
                                            Rng& rng) {
  ControlSignal u = ControlSignal::zero(horizon, subintervals);
  for (double& v : u.values) v = rng.uniform(-amplitude, amplitude);
  return u;
}

}  // namespace orbitflow
