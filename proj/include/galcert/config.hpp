#pragma once

/**
 * @file config.hpp
 * @brief Run configuration: JSON schema parsing with field-level diagnostics.
 *
 * Schema (all sections except "problem" optional, defaults in braces):
 *
 *   {
 *     "problem": {
 *       "A": [[...], ...],            // n x n
 *       "B": [[...], ...],            // n x m
 *       "x0": [...],                  // n
 *       "state_set": {"kind": "unconstrained"},        // default
 *       "input_set": {"kind": "box", "bound": [...]}   // or "polyhedron" {"G","h"},
 *     },                                               //    "ball" {"radius"}
 *     "basis":  {"p": 1.0, "s_min": 1, "s_max": 10},
 *     "modes":  {"upper_set_mode": "sampled" | "sampled_with_tail",
 *                "weight_count": {4}},
 *     "solver": {"tol": {1e-8}, "max_iter": {50000}},
 *     "oracle": {"T": {auto}, "N": {800}},
 *     "output": {"dir": {"."}, "report_json": {"report.json"},
 *                "report_csv": {"report.csv"}, "plot_csv": {"plot.csv"}}
 *   }
 */

#include <fstream>
#include <string>

#include <json.hpp>

#include "galcert/certify.hpp"
#include "galcert/report_io.hpp"

namespace galcert {

/// Parsed and cross-checked run configuration.
struct RunConfig
{
  LtiProblem problem;
  double p = 1.0;
  int s_min = 1;
  int s_max = 10;
  SweepConfig sweep;
  std::string out_dir = ".";
  std::string report_json = "report.json";
  std::string report_csv = "report.csv";
  std::string plot_csv = "plot.csv";
};

/// Configuration errors carry the offending field in what().
struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const nlohmann::json & require_field(
  const nlohmann::json & j, const std::string & key, const std::string & path)
{
  if (!j.contains(key)) { throw ConfigError(path + key + ": missing required field"); }
  return j.at(key);
}

inline Eigen::MatrixXd parse_matrix(const nlohmann::json & j, const std::string & path)
{
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError(path + ": expected a nested array of numbers");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ConfigError(path + ": ragged rows (row " + std::to_string(r) + ")");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) { throw ConfigError(path + ": non-numeric entry"); }
      out(r, c) = j[r][c].get<double>();
    }
  }
  return out;
}

inline Eigen::VectorXd parse_vector(const nlohmann::json & j, const std::string & path)
{
  if (!j.is_array()) { throw ConfigError(path + ": expected an array of numbers"); }
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (!j[i].is_number()) { throw ConfigError(path + ": non-numeric entry"); }
    out(i) = j[i].get<double>();
  }
  return out;
}

inline SetDescription parse_set(const nlohmann::json & j, const std::string & path)
{
  const std::string kind = require_field(j, "kind", path + ".").get<std::string>();
  if (kind == "unconstrained") { return SetDescription::unconstrained(); }
  if (kind == "box") {
    return SetDescription::box(parse_vector(require_field(j, "bound", path + "."), path + ".bound"));
  }
  if (kind == "polyhedron") {
    return SetDescription::polyhedron(
      parse_matrix(require_field(j, "G", path + "."), path + ".G"),
      parse_vector(require_field(j, "h", path + "."), path + ".h"));
  }
  if (kind == "ball") {
    const auto & r = require_field(j, "radius", path + ".");
    if (!r.is_number()) { throw ConfigError(path + ".radius: expected a number"); }
    return SetDescription::ball(r.get<double>());
  }
  throw ConfigError(path + ".kind: unknown set kind '" + kind + "'");
}

}  // namespace detail

/// Parse and cross-validate a configuration document.
inline RunConfig parse_config(const nlohmann::json & j)
{
  using detail::require_field;
  RunConfig config;

  const auto & problem = require_field(j, "problem", "");
  config.problem.A = detail::parse_matrix(require_field(problem, "A", "problem."), "problem.A");
  config.problem.B = detail::parse_matrix(require_field(problem, "B", "problem."), "problem.B");
  config.problem.x0 = detail::parse_vector(require_field(problem, "x0", "problem."), "problem.x0");
  if (problem.contains("state_set")) {
    config.problem.state_set = detail::parse_set(problem.at("state_set"), "problem.state_set");
  }
  if (problem.contains("input_set")) {
    config.problem.input_set = detail::parse_set(problem.at("input_set"), "problem.input_set");
  }

  if (j.contains("basis")) {
    const auto & basis = j.at("basis");
    if (basis.contains("p")) { config.p = basis.at("p").get<double>(); }
    if (basis.contains("s_min")) { config.s_min = basis.at("s_min").get<int>(); }
    if (basis.contains("s_max")) { config.s_max = basis.at("s_max").get<int>(); }
  }
  if (j.contains("modes")) {
    const auto & modes = j.at("modes");
    if (modes.contains("upper_set_mode")) {
      config.sweep.upper_mode =
        detail::mode_from_name(modes.at("upper_set_mode").get<std::string>());
      if (config.sweep.upper_mode == SetMode::Moment) {
        throw ConfigError("modes.upper_set_mode: moment mode is reserved for the lower sets");
      }
    }
    if (modes.contains("weight_count")) {
      config.sweep.weight_count = modes.at("weight_count").get<int>();
    }
  }
  if (j.contains("solver")) {
    const auto & solver = j.at("solver");
    if (solver.contains("tol")) { config.sweep.tol = solver.at("tol").get<double>(); }
    if (solver.contains("max_iter")) { config.sweep.max_iter = solver.at("max_iter").get<int>(); }
  }
  if (j.contains("oracle")) {
    const auto & oracle = j.at("oracle");
    if (oracle.contains("T")) { config.sweep.oracle_horizon = oracle.at("T").get<double>(); }
    if (oracle.contains("N")) { config.sweep.oracle_intervals = oracle.at("N").get<int>(); }
  }
  if (j.contains("output")) {
    const auto & output = j.at("output");
    if (output.contains("dir")) { config.out_dir = output.at("dir").get<std::string>(); }
    if (output.contains("report_json")) {
      config.report_json = output.at("report_json").get<std::string>();
    }
    if (output.contains("report_csv")) {
      config.report_csv = output.at("report_csv").get<std::string>();
    }
    if (output.contains("plot_csv")) { config.plot_csv = output.at("plot_csv").get<std::string>(); }
  }

  // cross-checks before any solve
  try {
    config.problem.validate();
  } catch (const std::invalid_argument & err) {
    throw ConfigError(err.what());
  }
  if (!(config.p > 0.0)) { throw ConfigError("basis.p: must be positive"); }
  if (config.s_min < 1) { throw ConfigError("basis.s_min: must be >= 1"); }
  if (config.s_max < config.s_min) { throw ConfigError("basis.s_max: must be >= s_min"); }
  if (config.s_max > kMaxBasisSize) {
    throw ConfigError("basis.s_max: exceeds cap " + std::to_string(kMaxBasisSize));
  }
  if (!(config.sweep.tol > 0.0)) { throw ConfigError("solver.tol: must be positive"); }
  if (config.sweep.max_iter < 1) { throw ConfigError("solver.max_iter: must be >= 1"); }
  if (config.sweep.oracle_intervals < 10) { throw ConfigError("oracle.N: must be >= 10"); }
  if (config.sweep.weight_count < 1) { throw ConfigError("modes.weight_count: must be >= 1"); }
  return config;
}

/// Load a configuration file; errors carry the file or field context.
inline RunConfig load_config(const std::string & path)
{
  std::ifstream stream(path);
  if (!stream) { throw ConfigError("cannot open config file: " + path); }
  nlohmann::json j;
  try {
    stream >> j;
  } catch (const nlohmann::json::parse_error & err) {
    throw ConfigError(path + ": " + err.what());
  }
  return parse_config(j);
}

}  // namespace galcert
