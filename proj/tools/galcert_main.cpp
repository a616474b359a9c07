// galcert command-line front end: run certification sweeps from a JSON
// config, query the oracle values, or run the built-in invariant suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "galcert/config.hpp"
#include "galcert/report_io.hpp"
#include "galcert/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFlagViolation = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverFailure = 3;

struct RunOverrides
{
  std::string out_dir;
  double tol = 0.0;
  int s_max = 0;
  std::string mode;
};

int cmd_run(const std::string & config_path, const RunOverrides & overrides)
{
  galcert::RunConfig config;
  try {
    config = galcert::load_config(config_path);
    if (!overrides.out_dir.empty()) { config.out_dir = overrides.out_dir; }
    if (overrides.tol > 0.0) { config.sweep.tol = overrides.tol; }
    if (overrides.s_max > 0) {
      config.s_max = overrides.s_max;
      if (config.s_min > config.s_max) { config.s_min = 1; }
    }
    if (!overrides.mode.empty()) {
      config.sweep.upper_mode = galcert::detail::mode_from_name(overrides.mode);
    }
  } catch (const std::exception & err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfigError;
  }

  galcert::BoundReport report;
  try {
    report = galcert::run_sweep(config.problem, config.p, config.s_min, config.s_max,
                                config.sweep);
  } catch (const std::exception & err) {
    std::cerr << "solver failure: " << err.what() << '\n';
    return kExitSolverFailure;
  }

  try {
    std::filesystem::create_directories(config.out_dir);
    const auto out = [&](const std::string & name) {
      return (std::filesystem::path(config.out_dir) / name).string();
    };
    galcert::write_file(out(config.report_json), galcert::report_to_json(report).dump(2) + "\n");
    galcert::write_file(out(config.report_csv), galcert::report_to_csv(report));
    galcert::write_file(out(config.plot_csv), galcert::plot_data_to_csv(report));
  } catch (const std::exception & err) {
    std::cerr << "output error: " << err.what() << '\n';
    return kExitSolverFailure;
  }

  for (const auto & rec : report.records) {
    if (!rec.error.empty()) {
      std::cerr << "solver failure: s=" << rec.s << ": " << rec.error << '\n';
      return kExitSolverFailure;
    }
  }

  std::printf("oracle (%s): %.12g +- %.3g\n", report.oracle.source.c_str(),
              report.oracle.value, report.oracle.band);
  std::printf("%4s %16s %16s %12s\n", "s", "J_s", "Jtilde_s", "gap");
  for (const auto & rec : report.records) {
    std::printf("%4d %16.9g %16.9g %12.4g\n", rec.s, rec.upper_cost, rec.lower_cost, rec.gap);
  }
  const auto flag = [](bool ok) { return ok ? "pass" : "FAIL"; };
  std::printf("upper_monotone: %s%s\n",
              flag(report.upper_monotone),
              report.upper_monotone_checked ? "" : " (not checked in tail mode)");
  std::printf("lower_monotone: %s\n", flag(report.lower_monotone));
  std::printf("sandwich:       %s\n", flag(report.sandwich_ok));
  std::printf("cauchy:         %s\n", flag(report.cauchy_ok));
  std::printf("duality:        %s\n", flag(report.duality_ok));
  std::printf("exactness:      %s\n", flag(report.exactness_ok));

  if (!report.all_ok()) {
    std::cerr << "flag violation: a certified relation failed, see the report\n";
    return kExitFlagViolation;
  }
  return kExitOk;
}

int cmd_oracle(const std::string & config_path)
{
  galcert::RunConfig config;
  try {
    config = galcert::load_config(config_path);
  } catch (const std::exception & err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfigError;
  }

  try {
    const galcert::RiccatiSolution care =
      galcert::solve_care(config.problem.A, config.problem.B);
    std::printf("care_value: %.17g\n", care.cost(config.problem.x0));
    std::printf("closed_loop_eigs:");
    for (Eigen::Index i = 0; i < care.closed_loop_eigs.size(); ++i) {
      std::printf(" %.12g%+.12gi", care.closed_loop_eigs(i).real(),
                  care.closed_loop_eigs(i).imag());
    }
    std::printf("\n");

    const double T = config.sweep.oracle_horizon > 0.0 ? config.sweep.oracle_horizon
                                                       : galcert::default_oracle_horizon(care);
    const galcert::CollocationResult colo =
      galcert::collocation_cost(config.problem, T, config.sweep.oracle_intervals);
    if (!colo.feasible) {
      std::cerr << "solver failure: collocation reports infeasible\n";
      return kExitSolverFailure;
    }
    std::printf("collocation_value: %.17g\n", colo.cost);
    std::printf("collocation_band: %.17g\n", colo.convergence_estimate);
    std::printf("collocation_converged: %s\n", colo.converged ? "true" : "false");
  } catch (const std::exception & err) {
    std::cerr << "solver failure: " << err.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitOk;
}

int cmd_selftest(double tol, const std::string & inject)
{
  galcert::SelftestOptions options;
  options.tol = tol;
  options.inject = inject;
  const auto checks = galcert::run_selftest(options);

  bool all_passed = true;
  std::printf("%-28s %14s %14s %6s\n", "check", "observed", "threshold", "result");
  for (const auto & check : checks) {
    std::printf("%-28s %14.4e %14.4e %6s\n", check.name.c_str(), check.observed,
                check.threshold, check.passed ? "pass" : "FAIL");
    all_passed = all_passed && check.passed;
  }
  if (!all_passed) {
    std::cerr << "flag violation: selftest reported failures\n";
    return kExitFlagViolation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"certified upper/lower bounds for constrained infinite-horizon LQ problems"};
  app.require_subcommand(1);

  std::string config_path;
  RunOverrides overrides;

  CLI::App * run = app.add_subcommand("run", "run a certification sweep from a config file");
  run->add_option("--config", config_path, "JSON configuration file")->required();
  run->add_option("--out", overrides.out_dir, "output directory (overrides config)");
  run->add_option("--tol", overrides.tol, "solver tolerance (overrides config)");
  run->add_option("--s-max", overrides.s_max, "largest basis size (overrides config)");
  run->add_option("--mode", overrides.mode, "upper set mode: sampled | sampled_with_tail")
    ->check(CLI::IsMember({"sampled", "sampled_with_tail"}));

  std::string oracle_config;
  CLI::App * oracle = app.add_subcommand("oracle", "print the reference values for a config");
  oracle->add_option("--config", oracle_config, "JSON configuration file")->required();

  double selftest_tol = 0.0;
  std::string inject;
  CLI::App * selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
  selftest->add_option("--tol", selftest_tol, "override the per-check thresholds");
  selftest->add_option("--inject", inject, "inject a named fault (generator)")
    ->check(CLI::IsMember({"generator"}));

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) { return cmd_run(config_path, overrides); }
  if (oracle->parsed()) { return cmd_oracle(oracle_config); }
  return cmd_selftest(selftest_tol, inject);
}
