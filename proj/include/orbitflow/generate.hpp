#pragma once

#include <vector>

#include "orbitflow/problem.hpp"
#include "orbitflow/rng.hpp"

namespace orbitflow {

/// Evenly spaced spectrum in (0, 1) normalized to unit trace (density-matrix
/// convention), descending: lambda_i = 2(n - i) / (n (n + 1)), i = 0..n-1.
inline std::vector<double> default_rho0_spectrum(int n) {
  std::vector<double> s(static_cast<size_t>(n));
  const double z = static_cast<double>(n) * (n + 1);
  for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = 2.0 * (n - i) / z;
  return s;
}

/// Evenly spaced symmetric observable spectrum, descending: n-1, n-3, ..., 1-n.
inline std::vector<double> default_theta_spectrum(int n) {
  std::vector<double> s(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = static_cast<double>(n - 1 - 2 * i);
  return s;
}

struct GeneratorSpec {
  int n = 2;
  uint64_t seed = 0;
  double horizon = 5.0;
  double hamiltonian_scale = 1.0;  ///< Frobenius norm of H0, H1 when normalize
  bool normalize = true;
  std::vector<double> rho0_spectrum;   ///< empty -> default_rho0_spectrum
  std::vector<double> theta_spectrum;  ///< empty -> default_theta_spectrum
  int max_attempts = 64;
};

namespace detail {

inline RealVector checked_spectrum(std::vector<double> values, int n, double gap_tol,
                                   const char* what) {
  require(static_cast<int>(values.size()) == n, std::string(what) + ": spectrum size must equal n");
  std::sort(values.begin(), values.end(), std::greater<double>());
  for (size_t i = 0; i + 1 < values.size(); ++i)
    if (values[i] - values[i + 1] < gap_tol)
      throw std::invalid_argument(std::string(what) + ": degenerate spectrum requested");
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = values[static_cast<size_t>(i)];
  return v;
}

}  // namespace detail

/// Draws a validated problem: Gaussian su(n) generators and prescribed simple
/// spectra with random eigenbases, retrying (bounded) until the rank condition
/// and the simple-spectrum flags hold.
inline QuantumProblem generate_problem(const GeneratorSpec& spec, const Tolerances& tol = {}) {
  require(spec.n >= 2, "generate_problem: n must be at least 2");
  require(spec.horizon > 0.0, "generate_problem: horizon must be positive");
  const RealVector rho_spec = detail::checked_spectrum(
      spec.rho0_spectrum.empty() ? default_rho0_spectrum(spec.n) : spec.rho0_spectrum, spec.n,
      tol.spectral_gap, "generate_problem (rho0)");
  const RealVector theta_spec = detail::checked_spectrum(
      spec.theta_spectrum.empty() ? default_theta_spectrum(spec.n) : spec.theta_spectrum, spec.n,
      tol.spectral_gap, "generate_problem (theta)");

  Rng rng(spec.seed);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    QuantumProblem pb;
    pb.H0 = random_su(spec.n, rng, spec.hamiltonian_scale, spec.normalize);
    pb.H1 = random_su(spec.n, rng, spec.hamiltonian_scale, spec.normalize);
    pb.rho0 = random_hermitian_with_spectrum(rho_spec, rng);
    pb.theta = random_hermitian_with_spectrum(theta_spec, rng);
    pb.horizon = spec.horizon;
    validate_problem(pb, tol);
    if (pb.simple_spectra && pb.controllable) return pb;
  }
  throw std::runtime_error("generate_problem: no controllable draw within the attempt limit");
}

}  // namespace orbitflow
