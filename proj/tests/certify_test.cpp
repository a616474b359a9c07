#include "galcert/certify.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace galcert {
namespace {

LtiProblem scalar_integrator(double x0)
{
  LtiProblem prob;
  prob.A = Eigen::MatrixXd::Zero(1, 1);
  prob.B = Eigen::MatrixXd::Ones(1, 1);
  prob.x0 = Eigen::VectorXd::Constant(1, x0);
  return prob;
}

LtiProblem double_integrator()
{
  LtiProblem prob;
  prob.A = (Eigen::MatrixXd(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
  prob.B = (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished();
  prob.x0 = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  return prob;
}

TEST(RunSweep, ExactlyRepresentableProblemPinsBothBounds)
{
  // the optimal pair (e^{-t}, -e^{-t}) lies in the span of tau_1 for p = 1
  const BoundReport report = run_sweep(scalar_integrator(1.0), 1.0, 1, 5);
  ASSERT_EQ(report.records.size(), 5u);
  EXPECT_EQ(report.first_finite_s, 1);
  for (const auto & rec : report.records) {
    ASSERT_TRUE(rec.upper_ok()) << "s=" << rec.s << " " << rec.error;
    ASSERT_TRUE(rec.lower_ok()) << "s=" << rec.s;
    EXPECT_NEAR(rec.upper_cost, 0.5, 1e-9) << "s=" << rec.s;
    EXPECT_NEAR(rec.lower_cost, 0.5, 1e-9) << "s=" << rec.s;
  }
  EXPECT_TRUE(report.all_ok());
  EXPECT_EQ(report.oracle.source, "care");
  EXPECT_NEAR(report.oracle.value, 0.5, 1e-12);
}

TEST(RunSweep, HandKktSandwichAtPTwo)
{
  const BoundReport report = run_sweep(scalar_integrator(1.0), 2.0, 1, 1);
  const SweepRecord & rec = report.records.front();
  ASSERT_TRUE(rec.upper_ok());
  ASSERT_TRUE(rec.lower_ok());
  EXPECT_NEAR(rec.upper_cost, 0.625, 1e-9);
  EXPECT_NEAR(rec.lower_cost, 0.4, 1e-9);
  EXPECT_TRUE(report.sandwich_ok);  // 0.4 <= 0.5 <= 0.625
  EXPECT_NEAR(rec.gap, 0.225, 1e-9);
}

TEST(RunSweep, ZeroInitialStateGivesZeroCosts)
{
  const BoundReport report = run_sweep(scalar_integrator(0.0), 1.0, 1, 3);
  for (const auto & rec : report.records) {
    EXPECT_NEAR(rec.upper_cost, 0.0, 1e-10);
    EXPECT_NEAR(rec.lower_cost, 0.0, 1e-10);
  }
  EXPECT_TRUE(report.all_ok());
}

TEST(RunSweep, DoubleIntegratorTheoremProperties)
{
  const BoundReport report = run_sweep(double_integrator(), 1.0, 1, 12);
  // s = 1 cannot satisfy dynamics exactly (3 unknowns, 4 independent rows)
  EXPECT_FALSE(report.records[0].upper_ok());
  EXPECT_EQ(report.first_finite_s, 2);

  const double care_value = std::sqrt(3.0) / 2.0;
  for (const auto & rec : report.records) {
    if (rec.upper_ok()) { EXPECT_GE(rec.upper_cost, care_value - 1e-7) << "s=" << rec.s; }
    if (rec.lower_ok()) { EXPECT_LE(rec.lower_cost, care_value + 1e-7) << "s=" << rec.s; }
  }
  EXPECT_TRUE(report.upper_monotone);
  EXPECT_TRUE(report.lower_monotone);
  EXPECT_TRUE(report.sandwich_ok);
  EXPECT_TRUE(report.cauchy_ok);
  EXPECT_TRUE(report.duality_ok);
  EXPECT_TRUE(report.exactness_ok);
}

TEST(RunSweep, ConstrainedScalarIntegratorSandwich)
{
  LtiProblem prob = scalar_integrator(1.0);
  prob.input_set = SetDescription::box(Eigen::VectorXd::Constant(1, 0.4));
  SweepConfig config;
  config.oracle_intervals = 400;
  const BoundReport report = run_sweep(prob, 1.0, 1, 6, config);

  EXPECT_EQ(report.oracle.source, "collocation");
  EXPECT_GT(report.oracle.value, 0.5);

  // s = 1 forces u(0) = -1, violating the bound at the t = 0 sample
  EXPECT_FALSE(report.records[0].upper_ok());
  EXPECT_GE(report.first_finite_s, 2);

  int optimal_pairs = 0;
  for (const auto & rec : report.records) {
    if (rec.upper_ok() && rec.lower_ok()) { ++optimal_pairs; }
  }
  EXPECT_GE(optimal_pairs, 3);
  EXPECT_TRUE(report.lower_monotone);
  EXPECT_TRUE(report.upper_monotone);
  EXPECT_TRUE(report.sandwich_ok);
  EXPECT_TRUE(report.duality_ok);
  EXPECT_TRUE(report.exactness_ok);
}

TEST(RunSweep, TailModeSuppressesUpperMonotonicityFlag)
{
  LtiProblem prob = scalar_integrator(1.0);
  prob.input_set = SetDescription::box(Eigen::VectorXd::Constant(1, 0.4));
  SweepConfig config;
  config.upper_mode = SetMode::SampledWithTail;
  config.oracle_intervals = 400;
  const BoundReport report = run_sweep(prob, 1.0, 3, 5, config);
  EXPECT_FALSE(report.upper_monotone_checked);
  // sandwich still applies in tail mode
  EXPECT_TRUE(report.sandwich_ok);
}

TEST(CheckCauchy, IdenticalSolutionsGiveZeroDistance)
{
  Solution a, b;
  a.z = (Eigen::VectorXd(2) << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)).finished();
  a.objective = 0.5;
  b.z = (Eigen::VectorXd(4) << 1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0), 0.0).finished();
  b.objective = 0.5;
  const CauchyCheck check = check_cauchy(a, b, 1, 1, 1);
  EXPECT_NEAR(check.lhs, 0.0, 1e-15);
  EXPECT_NEAR(check.rhs, 0.0, 1e-15);
  EXPECT_TRUE(check.ok);
}

TEST(CheckCauchy, BoundHoldsOnPTwoSweep)
{
  const BoundReport report = run_sweep(scalar_integrator(1.0), 2.0, 1, 6);
  for (std::size_t idx = 1; idx < report.records.size(); ++idx) {
    const SweepRecord & rec = report.records[idx];
    ASSERT_TRUE(std::isfinite(rec.cauchy_lhs));
    EXPECT_LE(rec.cauchy_lhs, rec.cauchy_rhs + 4e-7) << "s=" << rec.s;
    EXPECT_TRUE(rec.cauchy_ok);
  }
  // strict decrease at small s makes the bound informative, not vacuous
  EXPECT_GT(report.records[1].cauchy_rhs, 1e-4);
}

TEST(AdjointExactness, LowerSolutionSatisfiesAdjointUpperDoesNot)
{
  const LtiProblem prob = scalar_integrator(1.0);
  const BasisSpec spec = make_basis(2.0, 1);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(200, 0.0, 10.0);

  ConicProgram lower;
  lower.equality = assemble_lower(prob, spec);
  lower.dim = 2;
  const Solution low = solve_equality_qp(lower);
  ASSERT_EQ(low.status, SolveStatus::Optimal);
  EXPECT_LE(check_adjoint_exactness(low, lower, prob, spec, grid),
            1e-6 * (1.0 + low.dual_eq.norm()));

  // zero data: residual identically zero
  ConicProgram lower0;
  lower0.equality = assemble_lower(scalar_integrator(0.0), spec);
  lower0.dim = 2;
  const Solution low0 = solve_equality_qp(lower0);
  EXPECT_EQ(check_adjoint_exactness(low0, lower0, prob, spec, grid), 0.0);

  // the upper problem's dynamics multipliers do not satisfy this adjoint form
  ConicProgram upper;
  upper.equality = assemble_upper(prob, spec);
  upper.dim = 2;
  const Solution up = solve_equality_qp(upper);
  ASSERT_EQ(up.status, SolveStatus::Optimal);
  const ParamVector eta_p{up.dual_eq.head(1), 1};
  const ParamVector eta_v{up.z.head(1), 1};
  EXPECT_GT(adjoint_residual(eta_p, eta_v, prob, spec, grid), 1e-3);
}

TEST(ConvergenceSummary, ZeroGapFamilyReportsRatioZero)
{
  const BoundReport report = run_sweep(scalar_integrator(1.0), 1.0, 1, 4);
  const ConvergenceSummary summary = convergence_summary(report);
  EXPECT_EQ(summary.ratio, 0.0);
}

TEST(ConvergenceSummary, PTwoGapCollapses)
{
  const BoundReport report = run_sweep(scalar_integrator(1.0), 2.0, 1, 20);
  const ConvergenceSummary summary = convergence_summary(report);
  EXPECT_NEAR(summary.gap_first, 0.225, 1e-8);
  EXPECT_LT(summary.ratio, 0.05);
}

TEST(ConvergenceSummary, SingleRecordThrows)
{
  const BoundReport report = run_sweep(scalar_integrator(1.0), 1.0, 2, 2);
  EXPECT_THROW(convergence_summary(report), std::invalid_argument);
}

}  // namespace
}  // namespace galcert
