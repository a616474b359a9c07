#include "galcert/collocation.hpp"
#include "galcert/riccati.hpp"

#include <cmath>
#include <random>

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

TEST(SolveCare, ScalarIntegrator)
{
  const RiccatiSolution sol = solve_care(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1));
  EXPECT_NEAR(sol.P(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(sol.cost(Eigen::VectorXd::Ones(1)), 0.5, 1e-12);
  EXPECT_NEAR(sol.closed_loop_eigs(0).real(), -1.0, 1e-12);
}

TEST(SolveCare, StableScalar)
{
  const RiccatiSolution sol =
    solve_care(Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::MatrixXd::Ones(1, 1));
  EXPECT_NEAR(sol.P(0, 0), std::sqrt(2.0) - 1.0, 1e-12);
}

TEST(SolveCare, DoubleIntegrator)
{
  const LtiProblem prob = double_integrator();
  const RiccatiSolution sol = solve_care(prob.A, prob.B);
  Eigen::MatrixXd expected(2, 2);
  expected << std::sqrt(3.0), 1.0, 1.0, std::sqrt(3.0);
  EXPECT_LT((sol.P - expected).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_NEAR(sol.cost(prob.x0), std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(SolveCare, ResidualAndStabilityInvariants)
{
  std::mt19937 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&]() { return gauss(rng); });
    const Eigen::MatrixXd B = Eigen::MatrixXd::NullaryExpr(n, 2, [&]() { return gauss(rng); });
    const RiccatiSolution sol = solve_care(A, B);

    const Eigen::MatrixXd residual = A.transpose() * sol.P + sol.P * A
                                   - sol.P * B * B.transpose() * sol.P
                                   + Eigen::MatrixXd::Identity(n, n);
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-10 * (1.0 + sol.P.cwiseAbs().maxCoeff()));
    for (int i = 0; i < n; ++i) { EXPECT_LT(sol.closed_loop_eigs(i).real(), 0.0); }
    // P positive definite
    Eigen::LLT<Eigen::MatrixXd> llt(sol.P);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(SolveCare, ReportsUncontrollableUnstableMode)
{
  // x1 unstable and disconnected from the input
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 0.0, 0.0, -1.0;
  Eigen::MatrixXd B(2, 1);
  B << 0.0, 1.0;
  try {
    solve_care(A, B);
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument & err) {
    EXPECT_NE(std::string(err.what()).find("2.0"), std::string::npos);
  }
}

TEST(CollocationCost, UnconstrainedScalarIntegratorMatchesCare)
{
  const CollocationResult res = collocation_cost(scalar_integrator(1.0), 15.0, 3000);
  ASSERT_TRUE(res.feasible);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.cost, 0.5, 1e-4);
  EXPECT_NEAR(res.cost, 0.5, 3.0 * res.convergence_estimate + 1e-9);
}

TEST(CollocationCost, UnconstrainedDoubleIntegratorMatchesCare)
{
  const CollocationResult res = collocation_cost(double_integrator(), 20.0, 1500);
  ASSERT_TRUE(res.feasible);
  EXPECT_NEAR(res.cost, std::sqrt(3.0) / 2.0, 1e-3);
}

TEST(CollocationCost, InputBoundRaisesValue)
{
  LtiProblem prob = scalar_integrator(1.0);
  prob.input_set = SetDescription::box(Eigen::VectorXd::Constant(1, 0.4));
  const CollocationResult res = collocation_cost(prob, 15.0, 600);
  ASSERT_TRUE(res.feasible);
  EXPECT_TRUE(res.converged);
  EXPECT_GT(res.cost, 0.5);
}

TEST(CollocationCost, ValueDecreasesDownTheRefinementLadder)
{
  const LtiProblem prob = scalar_integrator(1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto & [T, N] : std::vector<std::pair<double, int>>{{6.0, 60}, {10.0, 200}, {15.0, 800}}) {
    const CollocationResult res = collocation_cost(prob, T, N);
    ASSERT_TRUE(res.feasible);
    EXPECT_LE(res.cost, previous + 1e-9);
    previous = res.cost;
  }
  EXPECT_NEAR(previous, 0.5, 1e-3);
}

TEST(CollocationCost, RejectsBadArguments)
{
  EXPECT_THROW(collocation_cost(scalar_integrator(1.0), -1.0, 100), std::invalid_argument);
  EXPECT_THROW(collocation_cost(scalar_integrator(1.0), 10.0, 5), std::invalid_argument);
}

}  // namespace
}  // namespace galcert
