#include "galcert/sets.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace galcert {
namespace {

SetDescription scalar_box(double bound)
{
  return SetDescription::box(Eigen::VectorXd::Constant(1, bound));
}

// scale a coefficient vector into the set (every set here contains 0 in its
// interior, so halving terminates)
Eigen::VectorXd make_feasible(const CoefficientSet & set, Eigen::VectorXd eta)
{
  int guard = 0;
  while (set.violation(eta) > 0.0 && guard++ < 200) { eta *= 0.5; }
  return eta;
}

TEST(BuildUpperSet, UnconstrainedIsEmpty)
{
  const BasisSpec spec = make_basis(1.0, 3);
  const CoefficientSet set =
    build_upper_set(SetDescription::unconstrained(), spec, default_constraint_grid(spec), 1);
  EXPECT_TRUE(set.empty());
}

TEST(BuildUpperSet, ScalarBoxSampledAtZero)
{
  const BasisSpec spec = make_basis(1.0, 1);
  const Eigen::VectorXd grid = Eigen::VectorXd::Zero(1);
  const CoefficientSet set = build_upper_set(scalar_box(0.4), spec, grid, 1);
  ASSERT_EQ(set.linear.size(), 2u);
  EXPECT_NEAR(set.linear[0].a(0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(set.linear[0].b, 0.4, 1e-15);
  EXPECT_NEAR(set.linear[1].a(0), -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(set.linear[1].b, 0.4, 1e-15);
}

TEST(BuildUpperSet, NestingAcrossBasisSizes)
{
  // included coefficients give identical trajectory values at the fixed grid
  std::mt19937 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const int s : {2, 5}) {
    const BasisSpec spec = make_basis(1.3, s);
    const BasisSpec spec_next = make_basis(1.3, s + 1);
    const Eigen::VectorXd grid = default_constraint_grid(spec);
    const CoefficientSet at_s = build_upper_set(scalar_box(0.7), spec, grid, 1);
    const CoefficientSet at_s1 = build_upper_set(scalar_box(0.7), spec_next, grid, 1);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd eta = make_feasible(
        at_s, Eigen::VectorXd::NullaryExpr(s, [&]() { return gauss(rng); }));
      const ParamVector padded = include_coeffs(ParamVector{eta, s}, s + 1);
      EXPECT_LE(at_s1.violation(padded.coeffs), 1e-14);
    }
  }
}

TEST(BuildUpperSet, TailConeCertifiesBeyondHorizon)
{
  const BasisSpec spec = make_basis(1.0, 4);
  const Eigen::VectorXd grid = default_constraint_grid(spec);
  const CoefficientSet set =
    build_upper_set(scalar_box(0.5), spec, grid, 1, SetMode::SampledWithTail);
  ASSERT_EQ(set.soc.size(), 1u);

  std::mt19937 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double t_end = grid(grid.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd eta = make_feasible(
      set, Eigen::VectorXd::NullaryExpr(4, [&]() { return gauss(rng); }));
    // the tail cone makes the pointwise bound hold for every t >= T_end
    for (int k = 0; k <= 40; ++k) {
      const double t = t_end * (1.0 + 3.0 * k / 40.0);
      const double u = trajectory_eval(ParamVector{eta, 4}, spec, t)(0);
      EXPECT_LE(std::abs(u), 0.5 + 1e-12);
    }
  }
}

TEST(BuildUpperSet, DegenerateRowFlagged)
{
  const BasisSpec spec = make_basis(1.0, 2);
  SetDescription set = SetDescription::polyhedron(
    (Eigen::MatrixXd(1, 1) << 1.0).finished(), Eigen::VectorXd::Zero(1));
  const CoefficientSet cs = build_upper_set(set, spec, default_constraint_grid(spec), 1);
  EXPECT_TRUE(cs.degenerate);
}

TEST(BuildUpperSet, RejectsBadGrid)
{
  const BasisSpec spec = make_basis(1.0, 2);
  EXPECT_THROW(
    build_upper_set(scalar_box(1.0), spec, (Eigen::VectorXd(2) << 0.5, 1.0).finished(), 1),
    std::invalid_argument);
  EXPECT_THROW(
    build_upper_set(scalar_box(1.0), spec, (Eigen::VectorXd(2) << 0.0, 0.0).finished(), 1),
    std::invalid_argument);
}

TEST(BuildLowerSet, FirstWeightMomentBound)
{
  const BasisSpec spec = make_basis(1.0, 1);
  const std::vector<Eigen::VectorXd> weights{Eigen::VectorXd::Unit(1, 0)};
  const CoefficientSet set = build_lower_set(scalar_box(0.4), spec, weights, 1);
  ASSERT_EQ(set.linear.size(), 2u);
  // int tau_1 dt = sqrt(2), so +-eta_u <= 0.4 sqrt(2)
  EXPECT_NEAR(set.linear[0].a(0), 1.0, 1e-15);
  EXPECT_NEAR(set.linear[0].b, 0.4 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(set.linear[1].a(0), -1.0, 1e-15);
}

TEST(BuildLowerSet, UnconstrainedIsEmpty)
{
  const BasisSpec spec = make_basis(2.0, 3);
  EXPECT_TRUE(
    build_lower_set(SetDescription::unconstrained(), spec, {Eigen::VectorXd::Unit(1, 0)}, 1)
      .empty());
}

TEST(BuildLowerSet, RejectsSignChangingWeight)
{
  const BasisSpec spec = make_basis(1.0, 2);
  const std::vector<Eigen::VectorXd> weights{Eigen::VectorXd::Unit(2, 1)};  // tau_2 changes sign
  EXPECT_THROW(build_lower_set(scalar_box(0.4), spec, weights, 1), std::invalid_argument);
}

TEST(BuildLowerSet, ProjectionsOfFeasibleTrajectoriesAreFeasible)
{
  // pointwise-feasible u implies pi^s(u) satisfies every moment constraint
  const BasisSpec spec = make_basis(1.0, 5);
  const std::vector<Eigen::VectorXd> weights = default_lower_weights(1.0, 4);
  const CoefficientSet set = build_lower_set(scalar_box(0.4), spec, weights, 1);

  {  // the spec witness u(t) = -0.4 e^{-t}
    const auto proj = project_function(
      [](double t) { return Eigen::VectorXd::Constant(1, -0.4 * std::exp(-t)); }, 1, spec);
    EXPECT_LE(set.violation(proj.eta.coeffs), 1e-9);
  }

  std::mt19937 rng(47);
  std::uniform_real_distribution<double> beta_dist(0.5, 3.0);
  std::uniform_real_distribution<double> mix(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // |c1| + |c2| <= 0.4 keeps |u(t)| <= 0.4 for all t
    const double b1 = beta_dist(rng), b2 = beta_dist(rng);
    double c1 = mix(rng), c2 = mix(rng);
    const double scale = 0.4 / (std::abs(c1) + std::abs(c2) + 1e-12);
    c1 *= scale;
    c2 *= scale;
    const auto proj = project_function(
      [&](double t) {
        return Eigen::VectorXd::Constant(1, c1 * std::exp(-b1 * t) + c2 * std::exp(-b2 * t));
      },
      1, spec);
    EXPECT_LE(set.violation(proj.eta.coeffs), 1e-9) << "trial " << trial;
  }
}

TEST(BuildLowerSet, TruncationNestingWithNestedWeights)
{
  const std::vector<Eigen::VectorXd> weights = default_lower_weights(1.0, 3);
  const BasisSpec spec_s = make_basis(1.0, 4);
  const BasisSpec spec_s1 = make_basis(1.0, 5);
  const CoefficientSet at_s = build_lower_set(scalar_box(0.6), spec_s, weights, 1);
  const CoefficientSet at_s1 = build_lower_set(scalar_box(0.6), spec_s1, weights, 1);

  std::mt19937 rng(53);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd eta = make_feasible(
      at_s1, Eigen::VectorXd::NullaryExpr(5, [&]() { return gauss(rng); }));
    const ParamVector truncated = truncate_project(ParamVector{eta, 5}, 4);
    EXPECT_LE(at_s.violation(truncated.coeffs), 1e-12);
  }
}

TEST(CertifyWeight, SpecExamples)
{
  const BasisSpec spec = make_basis(1.0, 2);
  EXPECT_TRUE(certify_nonnegative_weight(Eigen::VectorXd::Unit(2, 0), spec).accepted);

  const WeightCertificate tau2 = certify_nonnegative_weight(Eigen::VectorXd::Unit(2, 1), spec);
  EXPECT_FALSE(tau2.accepted);
  EXPECT_LT(tau2.min_value, -1e-10);

  const WeightCertificate zero = certify_nonnegative_weight(Eigen::VectorXd::Zero(2), spec);
  EXPECT_TRUE(zero.accepted);
  EXPECT_EQ(zero.min_value, 0.0);
}

TEST(CertifyWeight, TailSignCatchesGridBlindSpot)
{
  // large-t sign of the dominant term decides when the grid cannot
  const BasisSpec spec = make_basis(1.0, 3);
  Eigen::VectorXd c(3);
  c << 1.0, 0.0, -1e-12;  // negative leading coefficient with even index
  // tail term: c3 * L_2 -> (+z^2/2) * (-1e-12) < 0 for large t
  EXPECT_FALSE(certify_nonnegative_weight(c, spec).accepted);
}

TEST(MaxPointwiseViolation, InteriorZeroAndWitness)
{
  const BasisSpec spec = make_basis(1.0, 1);
  const Eigen::VectorXd dense = Eigen::VectorXd::LinSpaced(500, 0.0, 10.0);

  // u(t) = 0.2 e^{-t}: interior
  const ParamVector inside{Eigen::VectorXd::Constant(1, 0.2 / std::sqrt(2.0)), 1};
  EXPECT_EQ(max_pointwise_violation(inside, scalar_box(0.4), spec, dense), 0.0);

  // u(t) = 0.5 e^{-t}: violates by 0.1 at t = 0
  const ParamVector outside{Eigen::VectorXd::Constant(1, 0.5 / std::sqrt(2.0)), 1};
  EXPECT_NEAR(max_pointwise_violation(outside, scalar_box(0.4), spec, dense), 0.1, 1e-12);

  EXPECT_EQ(
    max_pointwise_violation(outside, SetDescription::unconstrained(), spec, dense), 0.0);
}

TEST(CoefficientSets, MidpointsOfFeasiblePointsAreFeasible)
{
  const BasisSpec spec = make_basis(1.0, 4);
  const CoefficientSet set =
    build_upper_set(scalar_box(0.5), spec, default_constraint_grid(spec), 1);

  std::mt19937 rng(61);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd a = make_feasible(
      set, Eigen::VectorXd::NullaryExpr(4, [&]() { return gauss(rng); }));
    const Eigen::VectorXd b = make_feasible(
      set, Eigen::VectorXd::NullaryExpr(4, [&]() { return gauss(rng); }));
    EXPECT_LE(set.violation(0.5 * (a + b)), 1e-14);
  }
}

TEST(CoefficientSets, MonotoneConservatism)
{
  const BasisSpec spec = make_basis(1.0, 4);
  std::mt19937 rng(71);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // enlarging the weight list never enlarges the lower set
  const auto weights4 = default_lower_weights(1.0, 4);
  const std::vector<Eigen::VectorXd> weights2(weights4.begin(), weights4.begin() + 2);
  const CoefficientSet small_list = build_lower_set(scalar_box(0.4), spec, weights2, 1);
  const CoefficientSet big_list = build_lower_set(scalar_box(0.4), spec, weights4, 1);

  // refining the grid never enlarges the upper set
  const CoefficientSet coarse =
    build_upper_set(scalar_box(0.4), spec, default_constraint_grid(spec, 16), 1);
  const CoefficientSet fine =
    build_upper_set(scalar_box(0.4), spec, default_constraint_grid(spec, 64), 1);

  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd eta = Eigen::VectorXd::NullaryExpr(4, [&]() { return gauss(rng); });
    if (big_list.violation(eta) <= 0.0) { EXPECT_LE(small_list.violation(eta), 0.0); }
    if (fine.violation(eta) <= 0.0) { EXPECT_LE(coarse.violation(eta), 0.0); }
  }
}

TEST(DefaultLowerWeights, NestedCertifiedFamily)
{
  for (const double p : {0.5, 1.0, 2.0}) {
    const auto weights = default_lower_weights(p, 4);
    ASSERT_GE(weights.size(), 1u);
    EXPECT_EQ(weights[0].size(), 1);
    EXPECT_EQ(weights[0](0), 1.0);
    const BasisSpec spec = make_basis(p, 8);
    for (std::size_t j = 0; j < weights.size(); ++j) {
      EXPECT_LE(weights[j].size(), 8);
      EXPECT_TRUE(certify_nonnegative_weight(weights[j], spec).accepted)
        << "p=" << p << " weight " << j;
    }
    // diverse supports, nested by construction
    for (std::size_t j = 1; j < weights.size(); ++j) {
      EXPECT_GT(weights[j].size(), weights[j - 1].size());
    }
  }
}

}  // namespace
}  // namespace galcert
