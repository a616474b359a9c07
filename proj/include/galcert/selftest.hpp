#pragma once

/**
 * @file selftest.hpp
 * @brief Built-in invariant suite behind the `selftest` CLI command.
 *
 * Each check reports the observed worst-case quantity against its threshold,
 * so a failure message carries the actual number. A fault can be injected by
 * name to verify the suite catches it, and the tolerance override replaces
 * the per-check thresholds.
 */

#include <random>
#include <string>
#include <vector>

#include "galcert/certify.hpp"
#include "galcert/sets.hpp"
#include "galcert/solver.hpp"

namespace galcert {

struct SelftestCheck
{
  std::string name;
  double observed = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct SelftestOptions
{
  double tol = 0.0;         ///< > 0 replaces every threshold
  std::string inject;       ///< "generator" corrupts M before the identity check
};

inline std::vector<SelftestCheck> run_selftest(const SelftestOptions & options = {})
{
  std::vector<SelftestCheck> checks;
  const auto add = [&](const std::string & name, double observed, double threshold) {
    const double th = options.tol > 0.0 ? options.tol : threshold;
    checks.push_back({name, observed, th, observed <= th});
  };

  {  // generator identity, the algebraic backbone of both assemblies
    double worst = 0.0;
    for (const double p : {0.5, 1.0, 2.0, 5.0}) {
      for (const int s : {1, 7, 30}) {
        BasisSpec spec = make_basis(p, s);
        if (options.inject == "generator") { spec.M(0, 0) += 1e-3; }
        worst = std::max(
          worst,
          (spec.M + spec.M.transpose() + spec.tau0 * spec.tau0.transpose()).cwiseAbs().maxCoeff());
      }
    }
    add("generator_identity", worst, 1e-12);
  }

  {  // orthonormality through quadrature
    double worst = 0.0;
    for (const double p : {0.5, 1.0, 2.0, 5.0}) {
      const BasisSpec spec = make_basis(p, 20);
      worst = std::max(
        worst,
        (gram_matrix(spec, 2 * spec.s) - Eigen::MatrixXd::Identity(spec.s, spec.s))
          .cwiseAbs()
          .maxCoeff());
    }
    add("gram_orthonormality", worst, 1e-8);
  }

  {  // tau' = M tau by central differences
    const BasisSpec spec = make_basis(1.0, 10);
    const double h = 1e-5;
    double worst = 0.0;
    for (const double t : {0.1, 0.7, 2.3, 6.0}) {
      const Eigen::VectorXd fd = (eval_basis(spec, t + h) - eval_basis(spec, t - h)) / (2.0 * h);
      const Eigen::VectorXd analytic = spec.M * eval_basis(spec, t);
      worst = std::max(worst, (fd - analytic).norm() / (1.0 + analytic.norm()));
    }
    add("ode_consistency", worst, 1e-6);
  }

  {  // Parseval: quadrature trajectory norm equals coefficient norm
    std::mt19937 rng(2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const BasisSpec spec = make_basis(1.5, 6);
    const QuadratureRule rule = exp_decay_rule(spec.p, 2 * spec.s);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ParamVector eta{
        Eigen::VectorXd::NullaryExpr(2 * spec.s, [&]() { return gauss(rng); }), spec.s};
      double norm_sq = 0.0;
      for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
        norm_sq += rule.weights(k) * trajectory_eval(eta, spec, rule.nodes(k)).squaredNorm();
      }
      worst = std::max(
        worst, std::abs(norm_sq - eta.coeffs.squaredNorm()) / (1.0 + norm_sq));
    }
    add("parseval", worst, 1e-8);
  }

  {  // Bessel on exponential sums with closed-form norms
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> beta_dist(0.4, 3.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const BasisSpec spec = make_basis(1.0, 6);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::Vector2d c{gauss(rng), gauss(rng)}, beta{beta_dist(rng), beta_dist(rng)};
      double norm_sq = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) { norm_sq += c(i) * c(j) / (beta(i) + beta(j)); }
      }
      const auto result = project_function(
        [&](double t) {
          return Eigen::VectorXd::Constant(
            1, c(0) * std::exp(-beta(0) * t) + c(1) * std::exp(-beta(1) * t));
        },
        1, spec);
      worst = std::max(worst, result.eta.coeffs.norm() - std::sqrt(norm_sq));
    }
    add("bessel_inequality", worst, 1e-8);
  }

  {  // inclusion/truncation round trip is exact
    std::mt19937 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ParamVector eta{Eigen::VectorXd::NullaryExpr(8, [&]() { return gauss(rng); }), 4};
      worst = std::max(
        worst,
        (truncate_project(include_coeffs(eta, 9), 4).coeffs - eta.coeffs).cwiseAbs().maxCoeff());
    }
    add("include_truncate_roundtrip", worst, 1e-15);
  }

  {  // upper-set nesting across basis sizes on a fixed grid
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const SetDescription box = SetDescription::box(Eigen::VectorXd::Constant(1, 0.5));
    const BasisSpec spec4 = make_basis(1.0, 4);
    const BasisSpec spec5 = make_basis(1.0, 5);
    const Eigen::VectorXd grid = default_constraint_grid(spec4);
    const CoefficientSet at4 = build_upper_set(box, spec4, grid, 1);
    const CoefficientSet at5 = build_upper_set(box, spec5, grid, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd eta = Eigen::VectorXd::NullaryExpr(4, [&]() { return gauss(rng); });
      int guard = 0;
      while (at4.violation(eta) > 0.0 && guard++ < 100) { eta *= 0.5; }
      worst = std::max(worst, at5.violation(include_coeffs(ParamVector{eta, 4}, 5).coeffs));
    }
    add("upper_set_nesting", worst, 1e-12);
  }

  {  // hand-solved KKT examples
    LtiProblem prob;
    prob.A = Eigen::MatrixXd::Zero(1, 1);
    prob.B = Eigen::MatrixXd::Ones(1, 1);
    prob.x0 = Eigen::VectorXd::Ones(1);

    const auto solve_upper = [&](double p) {
      ConicProgram prog;
      prog.equality = assemble_upper(prob, make_basis(p, 1));
      prog.dim = 2;
      return solve_equality_qp(prog).objective;
    };
    const auto solve_lower = [&](double p) {
      ConicProgram prog;
      prog.equality = assemble_lower(prob, make_basis(p, 1));
      prog.dim = 2;
      return solve_equality_qp(prog).objective;
    };
    add("hand_kkt_upper_p1", std::abs(solve_upper(1.0) - 0.5), 1e-9);
    add("hand_kkt_upper_p2", std::abs(solve_upper(2.0) - 0.625), 1e-9);
    add("hand_kkt_lower_p2", std::abs(solve_lower(2.0) - 0.4), 1e-9);
  }

  {  // scalar Riccati oracle
    const RiccatiSolution care =
      solve_care(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1));
    add("care_scalar", std::abs(care.P(0, 0) - 1.0), 1e-10);
  }

  return checks;
}

}  // namespace galcert
