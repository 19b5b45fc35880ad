#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "orbitflow/flow.hpp"
#include "orbitflow/problem.hpp"
#include "orbitflow/version.hpp"

namespace orbitflow::io {

using nlohmann::json;

/// Full-precision decimal formatting (17 significant digits), enough for exact
/// reparse of any double.
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// FNV-1a over a byte string; stable across platforms, used for provenance
/// hashes.
inline uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- problem files: complex entries as [re, im], row-major matrices ---------

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, int n, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("problem file: " + name + " must have " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j.at(static_cast<size_t>(r));
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::invalid_argument("problem file: " + name + " row " + std::to_string(r) +
                                  " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) {
      const json& e = row.at(static_cast<size_t>(c));
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("problem file: " + name + " entries must be [re, im] pairs");
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

inline json problem_to_json(const QuantumProblem& pb) {
  json j;
  j["format"] = "orbitflow-problem";
  j["version"] = 1;
  j["n"] = pb.n();
  j["horizon"] = pb.horizon;
  j["H0"] = matrix_to_json(pb.H0);
  j["H1"] = matrix_to_json(pb.H1);
  j["rho0"] = matrix_to_json(pb.rho0);
  j["theta"] = matrix_to_json(pb.theta);
  return j;
}

/// Parses and validates a problem; flags are filled by validate_problem.
inline QuantumProblem problem_from_json(const json& j, const Tolerances& tol = {}) {
  if (j.value("format", "") != std::string("orbitflow-problem"))
    throw std::invalid_argument("problem file: missing or unknown format tag");
  const int n = j.at("n").get<int>();
  QuantumProblem pb;
  pb.horizon = j.at("horizon").get<double>();
  pb.H0 = matrix_from_json(j.at("H0"), n, "H0");
  pb.H1 = matrix_from_json(j.at("H1"), n, "H1");
  pb.rho0 = matrix_from_json(j.at("rho0"), n, "rho0");
  pb.theta = matrix_from_json(j.at("theta"), n, "theta");
  validate_problem(pb, tol);
  return pb;
}

inline void write_problem(const std::string& path, const QuantumProblem& pb) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << problem_to_json(pb).dump(2) << "\n";
}

inline QuantumProblem read_problem(const std::string& path, const Tolerances& tol = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  json j;
  in >> j;
  return problem_from_json(j, tol);
}

// --- run artifacts -----------------------------------------------------------

inline std::string trace_to_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out << "iter,s,J,grad_norm,eta,accepted\n";
  for (const FlowIterate& it : trace.iterates)
    out << it.iter << ',' << format_full(it.s) << ',' << format_full(it.value) << ','
        << format_full(it.grad_norm) << ',' << format_full(it.eta) << ','
        << (it.accepted ? 1 : 0) << '\n';
  return out.str();
}

inline std::string control_to_csv(const ControlSignal& u) {
  std::ostringstream out;
  out << "k,t_mid,u\n";
  for (int k = 0; k < u.subintervals(); ++k)
    out << k << ',' << format_full(u.midpoint_time(k)) << ','
        << format_full(u.values[static_cast<size_t>(k)]) << '\n';
  return out.str();
}

inline json report_to_json(const ConvergenceReport& r) {
  json j;
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["final_J"] = r.final_value;
  j["J_max_oracle"] = r.max_value_oracle;
  j["gap"] = r.gap;
  j["final_grad_norm"] = r.final_grad_norm;
  j["commutator_norm"] = r.commutator_norm;
  if (r.nearest) {
    j["nearest_critical"] = {{"permutation", r.nearest->permutation},
                             {"distance", r.nearest->distance},
                             {"value", r.nearest->value},
                             {"morse_index", r.nearest->morse_index}};
  }
  if (r.status == FlowStatus::Saddle) j["saddle_index"] = r.saddle_index;
  j["gramian"] = {{"min", r.gramian_min},
                  {"max", r.gramian_max},
                  {"ratio", r.gramian_ratio},
                  {"corank", r.gramian_corank}};
  j["witness_residual"] = r.witness_residual;
  if (!r.hessian_probe.empty()) j["hessian_probe"] = r.hessian_probe;
  j["thresholds"] = {{"grad_tol", r.grad_tol}, {"comm_tol", r.comm_tol}, {"gap_tol", r.gap_tol}};
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace orbitflow::io
