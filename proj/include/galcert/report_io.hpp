#pragma once

/**
 * @file report_io.hpp
 * @brief JSON and CSV serialization of sweep reports.
 *
 * JSON carries the full report and round-trips exactly (non-finite values
 * are encoded as strings, since JSON numbers cannot represent them). The
 * CSVs are flat views for plotting pipelines, written with 17 significant
 * digits so identical runs produce byte-identical files.
 */

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "galcert/certify.hpp"

namespace galcert {

namespace detail {

inline nlohmann::json encode_double(double x)
{
  if (std::isfinite(x)) { return x; }
  if (std::isnan(x)) { return "nan"; }
  return x > 0 ? "inf" : "-inf";
}

inline double decode_double(const nlohmann::json & j)
{
  if (j.is_number()) { return j.get<double>(); }
  const std::string s = j.get<std::string>();
  if (s == "nan") { return std::numeric_limits<double>::quiet_NaN(); }
  if (s == "inf") { return std::numeric_limits<double>::infinity(); }
  if (s == "-inf") { return -std::numeric_limits<double>::infinity(); }
  throw std::invalid_argument("report: bad numeric encoding '" + s + "'");
}

inline std::string format_g17(double x)
{
  if (std::isnan(x)) { return "nan"; }
  if (std::isinf(x)) { return x > 0 ? "inf" : "-inf"; }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string status_name(SolveStatus status)
{
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

inline SolveStatus status_from_name(const std::string & name)
{
  if (name == "optimal") { return SolveStatus::Optimal; }
  if (name == "infeasible") { return SolveStatus::Infeasible; }
  if (name == "max_iter") { return SolveStatus::MaxIter; }
  throw std::invalid_argument("report: unknown status '" + name + "'");
}

inline std::string mode_name(SetMode mode)
{
  switch (mode) {
    case SetMode::Sampled: return "sampled";
    case SetMode::SampledWithTail: return "sampled_with_tail";
    case SetMode::Moment: return "moment";
  }
  return "unknown";
}

inline SetMode mode_from_name(const std::string & name)
{
  if (name == "sampled") { return SetMode::Sampled; }
  if (name == "sampled_with_tail") { return SetMode::SampledWithTail; }
  if (name == "moment") { return SetMode::Moment; }
  throw std::invalid_argument("config: unknown set mode '" + name + "'");
}

}  // namespace detail

inline nlohmann::json report_to_json(const BoundReport & report)
{
  using detail::encode_double;
  nlohmann::json j;
  j["tol"] = report.tol;
  j["upper_mode"] = detail::mode_name(report.upper_mode);
  j["first_finite_s"] = report.first_finite_s;
  j["oracle"] = {
    {"value", encode_double(report.oracle.value)},
    {"band", encode_double(report.oracle.band)},
    {"source", report.oracle.source},
  };
  j["flags"] = {
    {"upper_monotone", report.upper_monotone},
    {"upper_monotone_checked", report.upper_monotone_checked},
    {"lower_monotone", report.lower_monotone},
    {"sandwich_ok", report.sandwich_ok},
    {"cauchy_ok", report.cauchy_ok},
    {"duality_ok", report.duality_ok},
    {"exactness_ok", report.exactness_ok},
  };
  j["records"] = nlohmann::json::array();
  for (const auto & rec : report.records) {
    j["records"].push_back({
      {"s", rec.s},
      {"upper_cost", encode_double(rec.upper_cost)},
      {"lower_cost", encode_double(rec.lower_cost)},
      {"upper_status", detail::status_name(rec.upper_status)},
      {"lower_status", detail::status_name(rec.lower_status)},
      {"gap", encode_double(rec.gap)},
      {"dynamics_residual", encode_double(rec.dynamics_residual)},
      {"adjoint_residual", encode_double(rec.adjoint_residual)},
      {"upper_duality_gap", encode_double(rec.upper_duality_gap)},
      {"lower_duality_gap", encode_double(rec.lower_duality_gap)},
      {"intersample_violation", encode_double(rec.intersample_violation)},
      {"cauchy_lhs", encode_double(rec.cauchy_lhs)},
      {"cauchy_rhs", encode_double(rec.cauchy_rhs)},
      {"cauchy_ok", rec.cauchy_ok},
      {"upper_solution_norm", encode_double(rec.upper_solution_norm)},
      {"lower_dual_norm", encode_double(rec.lower_dual_norm)},
      {"error", rec.error},
    });
  }
  return j;
}

inline BoundReport report_from_json(const nlohmann::json & j)
{
  using detail::decode_double;
  BoundReport report;
  report.tol = j.at("tol").get<double>();
  report.upper_mode = detail::mode_from_name(j.at("upper_mode").get<std::string>());
  report.first_finite_s = j.at("first_finite_s").get<int>();
  report.oracle.value = decode_double(j.at("oracle").at("value"));
  report.oracle.band = decode_double(j.at("oracle").at("band"));
  report.oracle.source = j.at("oracle").at("source").get<std::string>();
  const auto & flags = j.at("flags");
  report.upper_monotone = flags.at("upper_monotone").get<bool>();
  report.upper_monotone_checked = flags.at("upper_monotone_checked").get<bool>();
  report.lower_monotone = flags.at("lower_monotone").get<bool>();
  report.sandwich_ok = flags.at("sandwich_ok").get<bool>();
  report.cauchy_ok = flags.at("cauchy_ok").get<bool>();
  report.duality_ok = flags.at("duality_ok").get<bool>();
  report.exactness_ok = flags.at("exactness_ok").get<bool>();
  for (const auto & rj : j.at("records")) {
    SweepRecord rec;
    rec.s = rj.at("s").get<int>();
    rec.upper_cost = decode_double(rj.at("upper_cost"));
    rec.lower_cost = decode_double(rj.at("lower_cost"));
    rec.upper_status = detail::status_from_name(rj.at("upper_status").get<std::string>());
    rec.lower_status = detail::status_from_name(rj.at("lower_status").get<std::string>());
    rec.gap = decode_double(rj.at("gap"));
    rec.dynamics_residual = decode_double(rj.at("dynamics_residual"));
    rec.adjoint_residual = decode_double(rj.at("adjoint_residual"));
    rec.upper_duality_gap = decode_double(rj.at("upper_duality_gap"));
    rec.lower_duality_gap = decode_double(rj.at("lower_duality_gap"));
    rec.intersample_violation = decode_double(rj.at("intersample_violation"));
    rec.cauchy_lhs = decode_double(rj.at("cauchy_lhs"));
    rec.cauchy_rhs = decode_double(rj.at("cauchy_rhs"));
    rec.cauchy_ok = rj.at("cauchy_ok").get<bool>();
    rec.upper_solution_norm = decode_double(rj.at("upper_solution_norm"));
    rec.lower_dual_norm = decode_double(rj.at("lower_dual_norm"));
    rec.error = rj.at("error").get<std::string>();
    report.records.push_back(std::move(rec));
  }
  return report;
}

/// Flat per-s table: costs, gaps, residuals, and a status summary per row.
inline std::string report_to_csv(const BoundReport & report)
{
  using detail::format_g17;
  std::string out =
    "s,J_s,Jtilde_s,gap,dyn_residual,duality_gap,cauchy_lhs,cauchy_rhs,flags\n";
  for (const auto & rec : report.records) {
    out += std::to_string(rec.s) + ',';
    out += format_g17(rec.upper_cost) + ',';
    out += format_g17(rec.lower_cost) + ',';
    out += format_g17(rec.gap) + ',';
    out += format_g17(rec.dynamics_residual) + ',';
    out += format_g17(rec.lower_duality_gap) + ',';
    out += format_g17(rec.cauchy_lhs) + ',';
    out += format_g17(rec.cauchy_rhs) + ',';
    out += "upper:" + detail::status_name(rec.upper_status)
         + ";lower:" + detail::status_name(rec.lower_status)
         + ";cauchy:" + (rec.cauchy_ok ? "ok" : "violated");
    out += '\n';
  }
  return out;
}

/// Plot-ready columns: s against both bounds and the oracle band.
inline std::string plot_data_to_csv(const BoundReport & report)
{
  using detail::format_g17;
  std::string out = "s,upper,lower,oracle,oracle_lo,oracle_hi\n";
  for (const auto & rec : report.records) {
    out += std::to_string(rec.s) + ',';
    out += format_g17(rec.upper_cost) + ',';
    out += format_g17(rec.lower_cost) + ',';
    out += format_g17(report.oracle.value) + ',';
    out += format_g17(report.oracle.value - report.oracle.band) + ',';
    out += format_g17(report.oracle.value + report.oracle.band) + '\n';
  }
  return out;
}

inline void write_file(const std::string & path, const std::string & contents)
{
  std::ofstream stream(path, std::ios::binary);
  if (!stream) { throw std::runtime_error("cannot open for writing: " + path); }
  stream << contents;
}

}  // namespace galcert
