#pragma once

/**
 * @file sets.hpp
 * @brief Finite-dimensional constraint sets for the upper and lower problems.
 *
 * Upper sets sample the pointwise constraint on a fixed time grid, which
 * preserves the nesting property across basis sizes exactly (included
 * coefficients give identical trajectory values at fixed grid points); the
 * pointwise guarantee between samples is a-posteriori checked via
 * max_pointwise_violation, or certified for the tail t >= T_end by an
 * opt-in cone constraint.
 *
 * Lower sets integrate the pointwise constraint against certified
 * nonnegative weight functions in the basis span: if x(t) lies in the set
 * for all t and w >= 0, then int w g^T x dt <= h int w dt, and the left side
 * is exact in the projected coefficients because w lies in the span.
 */

#include <vector>

#include "galcert/basis.hpp"
#include "galcert/coefficient_set.hpp"
#include "galcert/galerkin.hpp"
#include "galcert/problem.hpp"
#include "galcert/solver.hpp"

namespace galcert {

/// 64 points clustered toward 0 on [0, 12/p], plus t = 0 itself.
inline Eigen::VectorXd default_constraint_grid(const BasisSpec & spec, int points = 64)
{
  const double horizon = 12.0 / spec.p;
  Eigen::VectorXd grid(points + 1);
  grid(0) = 0.0;
  for (int k = 1; k <= points; ++k) {
    grid(k) = horizon * (1.0 - std::cos(0.5 * M_PI * k / points));
  }
  return grid;
}

/// Result of the nonnegativity check for a weight function.
struct WeightCertificate
{
  bool accepted = false;
  double min_value = 0.0;
};

/**
 * @brief Certify w(t) = c_w^T tau(t) >= 0 on [0, inf).
 *
 * Dense-grid minimum over [0, 40/p] combined with the sign of the dominant
 * tail term: as t grows, w ~ c_{i*} (-1)^{i*-1} (2pt)^{i*-1} e^{-pt} up to
 * positive factors, where i* is the highest-index nonzero coefficient.
 * Accepts iff the grid minimum is >= -1e-10 and the tail sign is nonnegative.
 */
inline WeightCertificate certify_nonnegative_weight(
  const Eigen::VectorXd & c_w, const BasisSpec & spec, int grid_points = 4000)
{
  WeightCertificate cert;
  if (c_w.size() > spec.s) { return cert; }

  Eigen::VectorXd padded = Eigen::VectorXd::Zero(spec.s);
  padded.head(c_w.size()) = c_w;

  int leading = -1;
  for (int i = spec.s - 1; i >= 0; --i) {
    if (padded(i) != 0.0) {
      leading = i;
      break;
    }
  }
  if (leading < 0) {  // zero weight
    cert.accepted = true;
    cert.min_value = 0.0;
    return cert;
  }
  const double tail_sign = padded(leading) * (leading % 2 == 0 ? 1.0 : -1.0);

  double min_value = std::numeric_limits<double>::infinity();
  const double horizon = 40.0 / spec.p;
  for (int k = 0; k <= grid_points; ++k) {
    const double t = horizon * k / grid_points;
    min_value = std::min(min_value, padded.dot(eval_basis(spec, t)));
  }
  cert.min_value = min_value;
  cert.accepted = min_value >= -1e-10 && tail_sign >= 0.0;
  return cert;
}

/**
 * @brief Sampled (optionally tail-certified) coefficient set for the upper problem.
 *
 * For each grid point the pointwise constraint is imposed on the trajectory
 * value; in SampledWithTail mode a cone row ||tau(T_end)|| |eta| <= r_in is
 * appended, where r_in is the inradius of the set at the origin. Since
 * ||tau(t)|| is nonincreasing, that certifies the constraint for all
 * t >= T_end. Rows with h = 0 make the inradius zero and are flagged; the
 * tail cone then forces eta = 0.
 */
inline CoefficientSet build_upper_set(
  const SetDescription & set,
  const BasisSpec & spec,
  const Eigen::VectorXd & grid,
  Eigen::Index q,
  SetMode mode = SetMode::Sampled)
{
  if (mode == SetMode::Moment) {
    throw std::invalid_argument("build_upper_set: moment mode belongs to the lower problem");
  }
  if (grid.size() == 0 || grid(0) != 0.0) {
    throw std::invalid_argument("build_upper_set: grid must start at 0");
  }
  for (Eigen::Index k = 1; k < grid.size(); ++k) {
    if (grid(k) <= grid(k - 1)) {
      throw std::invalid_argument("build_upper_set: grid must be strictly increasing");
    }
  }
  set.validate(q, "build_upper_set");

  CoefficientSet out;
  out.mode = mode;
  if (set.kind == SetDescription::Kind::Unconstrained) { return out; }

  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const Eigen::VectorXd tau = eval_basis(spec, grid(k));
    if (set.kind == SetDescription::Kind::Polyhedron) {
      for (Eigen::Index r = 0; r < set.G.rows(); ++r) {
        Eigen::VectorXd a(q * spec.s);
        for (Eigen::Index i = 0; i < q; ++i) {
          a.segment(i * spec.s, spec.s) = set.G(r, i) * tau;
        }
        out.linear.push_back({std::move(a), set.h(r)});
        if (set.h(r) == 0.0) { out.degenerate = true; }
      }
    } else {  // ball: |x(t_k)| <= r as a cone row per grid point
      SocConstraint cone;
      cone.W = detail::kron(Eigen::MatrixXd::Identity(q, q), tau.transpose());
      cone.bound = set.radius;
      out.soc.push_back(std::move(cone));
    }
  }

  if (mode == SetMode::SampledWithTail) {
    double inradius = 0.0;
    if (set.kind == SetDescription::Kind::Polyhedron) {
      inradius = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < set.G.rows(); ++r) {
        inradius = std::min(inradius, set.h(r) / set.G.row(r).norm());
      }
    } else {
      inradius = set.radius;
    }
    SocConstraint tail;
    tail.W = eval_basis(spec, grid(grid.size() - 1)).norm()
           * Eigen::MatrixXd::Identity(q * spec.s, q * spec.s);
    tail.bound = inradius;
    out.soc.push_back(std::move(tail));
  }
  return out;
}

/**
 * @brief Moment-relaxation coefficient set for the lower problem.
 *
 * Each weight is an s-vector (or shorter, zero-padded) of coefficients with
 * certified pointwise nonnegativity. For a polyhedron row (g, h) and weight
 * w the constraint is g (I kron c_w)^T eta <= h * int w dt, with
 * int w dt = c_w^T basis_integral; for a ball, |(I kron c_w)^T eta| <= r int w dt.
 * Weights longer than the basis are skipped (they leave the span); weights
 * failing certification are rejected.
 */
inline CoefficientSet build_lower_set(
  const SetDescription & set,
  const BasisSpec & spec,
  const std::vector<Eigen::VectorXd> & weights,
  Eigen::Index q)
{
  set.validate(q, "build_lower_set");
  CoefficientSet out;
  out.mode = SetMode::Moment;
  if (set.kind == SetDescription::Kind::Unconstrained) { return out; }

  const Eigen::VectorXd integral = basis_integral(spec);
  for (const Eigen::VectorXd & c_w : weights) {
    if (c_w.size() > spec.s) { continue; }
    const WeightCertificate cert = certify_nonnegative_weight(c_w, spec);
    if (!cert.accepted) {
      throw std::invalid_argument("build_lower_set: weight failed nonnegativity certification");
    }
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(spec.s);
    padded.head(c_w.size()) = c_w;
    const double weight_integral = padded.dot(integral);

    if (set.kind == SetDescription::Kind::Polyhedron) {
      for (Eigen::Index r = 0; r < set.G.rows(); ++r) {
        Eigen::VectorXd a(q * spec.s);
        for (Eigen::Index i = 0; i < q; ++i) {
          a.segment(i * spec.s, spec.s) = set.G(r, i) * padded;
        }
        out.linear.push_back({std::move(a), set.h(r) * weight_integral});
        if (set.h(r) == 0.0) { out.degenerate = true; }
      }
    } else {
      SocConstraint cone;
      cone.W = detail::kron(Eigen::MatrixXd::Identity(q, q), padded.transpose());
      cone.bound = set.radius * weight_integral;
      out.soc.push_back(std::move(cone));
    }
  }
  return out;
}

/**
 * @brief Max violation of the pointwise set constraint along a trajectory.
 *
 * Evaluates the trajectory on the given dense grid and returns the largest
 * constraint violation (0 when feasible everywhere on the grid). Used to
 * quantify the intersample caveat of sampled-mode upper sets.
 */
inline double max_pointwise_violation(
  const ParamVector & eta,
  const SetDescription & set,
  const BasisSpec & spec,
  const Eigen::VectorXd & dense_grid)
{
  if (set.kind == SetDescription::Kind::Unconstrained) { return 0.0; }
  double worst = 0.0;
  for (Eigen::Index k = 0; k < dense_grid.size(); ++k) {
    const Eigen::VectorXd x = trajectory_eval(eta, spec, dense_grid(k));
    if (set.kind == SetDescription::Kind::Polyhedron) {
      worst = std::max(worst, (set.G * x - set.h).maxCoeff());
    } else {
      worst = std::max(worst, x.norm() - set.radius);
    }
  }
  return worst;
}

/**
 * @brief Default nested weight list for the lower problem.
 *
 * Weight 1 is tau_1 (strictly positive). Weight j >= 2 lives on the first j
 * basis functions and maximizes the minimum of w over a window of times
 * (dyadic windows [2^{j-2}, 2^{j-1}]/p) subject to w >= 0 on a global grid
 * and |c| <= 1, solved as a regularized LP by the splitting solver. Weights
 * that fail the a-posteriori certification are dropped. The list is nested:
 * weight j is independent of the basis size it is later used with.
 */
inline std::vector<Eigen::VectorXd> default_lower_weights(double p, int count)
{
  std::vector<Eigen::VectorXd> weights;
  if (count < 1) { return weights; }
  weights.push_back(Eigen::VectorXd::Unit(1, 0));

  for (int j = 2; j <= count; ++j) {
    const BasisSpec spec = make_basis(p, j);

    const int n_global = 160, n_window = 33;
    const double t_lo = std::pow(2.0, j - 2) / p;
    const double t_hi = std::pow(2.0, j - 1) / p;

    // variables z = (c, delta): maximize delta subject to
    //   w(t_k) >= 0 globally, w(t_k) >= delta on the window, |c| <= 1
    detail::CoreProblem core;
    const Eigen::Index dim = j + 1;
    core.P.resize(dim, dim);
    core.P.setIdentity();
    core.P *= 1e-6;
    core.q = Eigen::VectorXd::Zero(dim);
    core.q(j) = -1.0;

    Eigen::MatrixXd C(n_global + n_window + j, dim);
    Eigen::VectorXd bound(n_global + n_window);
    for (int k = 0; k < n_global; ++k) {
      const double t = (40.0 / p) * k / (n_global - 1);
      C.row(k).head(j) = -eval_basis(spec, t).transpose();
      C(k, j) = 0.0;
      bound(k) = 0.0;
    }
    for (int k = 0; k < n_window; ++k) {
      const double t = t_lo + (t_hi - t_lo) * k / (n_window - 1);
      C.row(n_global + k).head(j) = -eval_basis(spec, t).transpose();
      C(n_global + k, j) = 1.0;
      bound(n_global + k) = 0.0;
    }
    C.bottomRows(j) << Eigen::MatrixXd::Identity(j, j), Eigen::VectorXd::Zero(j);

    core.C = C.sparseView();
    core.cone.eq_rhs.resize(0);
    core.cone.ineq_bound = bound;
    core.cone.soc_size.push_back(j);
    core.cone.soc_radius.push_back(1.0);

    detail::CoreParams prm;
    prm.tol_abs = prm.tol_rel = 1e-9;
    const detail::CoreResult res = detail::admm_solve(core, prm);
    if (res.status != SolveStatus::Optimal) { continue; }

    Eigen::VectorXd c = res.z.head(j);
    if (c.norm() < 1e-8) { continue; }
    if (!certify_nonnegative_weight(c, spec).accepted) { continue; }
    weights.push_back(std::move(c));
  }
  return weights;
}

}  // namespace galcert
