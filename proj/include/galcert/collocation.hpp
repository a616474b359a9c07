#pragma once

/**
 * @file collocation.hpp
 * @brief Dense time-discretized reference for the constrained problem.
 *
 * Trapezoidal collocation on [0, T] with the pointwise constraints imposed at
 * the nodes and a terminal cost 1/2 x(T)^T P x(T) from the unconstrained
 * Riccati solution, which stands in for the infinite tail when constraints
 * are inactive near T. Deliberately a different discretization from the
 * basis-function path: it provides the reference band the certification
 * layer compares against.
 */

#include <vector>

#include "galcert/problem.hpp"
#include "galcert/riccati.hpp"
#include "galcert/solver.hpp"

namespace galcert {

/// Collocation value with a Richardson-style accuracy estimate.
struct CollocationResult
{
  double cost = std::numeric_limits<double>::infinity();
  double convergence_estimate = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool feasible = true;
};

namespace detail {

/// Value of one trapezoidal discretization: N intervals, N+1 nodes.
inline std::pair<double, bool> collocation_value(
  const LtiProblem & prob, const Eigen::MatrixXd & terminal_p, double T, int N, double tol)
{
  const Eigen::Index n = prob.state_dim();
  const Eigen::Index m = prob.input_dim();
  const Eigen::Index per_node = n + m;       // z = [(x_i, u_i)]_i
  const Eigen::Index dim = (N + 1) * per_node;
  const double h = T / N;

  // cost Hessian: trapezoidal weights, terminal Riccati block on x_N
  std::vector<Eigen::Triplet<double>> p_trips;
  for (int i = 0; i <= N; ++i) {
    const double w = (i == 0 || i == N) ? 0.5 * h : h;
    for (Eigen::Index j = 0; j < per_node; ++j) {
      p_trips.emplace_back(i * per_node + j, i * per_node + j, w);
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      p_trips.emplace_back(N * per_node + r, N * per_node + c, terminal_p(r, c));
    }
  }
  Eigen::SparseMatrix<double> P(dim, dim);
  P.setFromTriplets(p_trips.begin(), p_trips.end());

  // equality rows: initial condition, then trapezoidal dynamics per interval
  const Eigen::Index eq_rows = n + N * n;
  std::vector<Eigen::Triplet<double>> c_trips;
  Eigen::VectorXd eq_rhs = Eigen::VectorXd::Zero(eq_rows);
  for (Eigen::Index r = 0; r < n; ++r) {
    c_trips.emplace_back(r, r, 1.0);
    eq_rhs(r) = prob.x0(r);
  }
  for (int i = 0; i < N; ++i) {
    const Eigen::Index row0 = n + i * n;
    const Eigen::Index xi = i * per_node, ui = i * per_node + n;
    const Eigen::Index xn = (i + 1) * per_node, un = (i + 1) * per_node + n;
    for (Eigen::Index r = 0; r < n; ++r) {
      c_trips.emplace_back(row0 + r, xn + r, 1.0);
      c_trips.emplace_back(row0 + r, xi + r, -1.0);
      for (Eigen::Index c = 0; c < n; ++c) {
        c_trips.emplace_back(row0 + r, xi + c, -0.5 * h * prob.A(r, c));
        c_trips.emplace_back(row0 + r, xn + c, -0.5 * h * prob.A(r, c));
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        c_trips.emplace_back(row0 + r, ui + c, -0.5 * h * prob.B(r, c));
        c_trips.emplace_back(row0 + r, un + c, -0.5 * h * prob.B(r, c));
      }
    }
  }

  // pointwise constraints at every node
  std::vector<Eigen::Triplet<double>> ineq_trips;
  std::vector<double> ineq_bounds;
  std::vector<Eigen::Index> soc_size;
  std::vector<double> soc_radius;
  std::vector<Eigen::Triplet<double>> soc_trips;
  Eigen::Index ineq_at = 0, soc_at = 0;
  const auto add_node_set = [&](const SetDescription & set, Eigen::Index offset,
                                Eigen::Index q) {
    if (set.kind == SetDescription::Kind::Polyhedron) {
      for (Eigen::Index r = 0; r < set.G.rows(); ++r) {
        for (Eigen::Index c = 0; c < q; ++c) {
          if (set.G(r, c) != 0.0) { ineq_trips.emplace_back(ineq_at, offset + c, set.G(r, c)); }
        }
        ineq_bounds.push_back(set.h(r));
        ++ineq_at;
      }
    } else if (set.kind == SetDescription::Kind::Ball) {
      for (Eigen::Index c = 0; c < q; ++c) { soc_trips.emplace_back(soc_at + c, offset + c, 1.0); }
      soc_size.push_back(q);
      soc_radius.push_back(set.radius);
      soc_at += q;
    }
  };
  for (int i = 0; i <= N; ++i) {
    add_node_set(prob.state_set, i * per_node, n);
    add_node_set(prob.input_set, i * per_node + n, m);
  }

  if (ineq_at == 0 && soc_at == 0) {
    // equality-constrained quadratic: one exact sparse KKT solve
    Eigen::SparseMatrix<double> L(eq_rows, dim);
    L.setFromTriplets(c_trips.begin(), c_trips.end());
    Eigen::VectorXd z, xi_mult;
    if (!solve_kkt_sparse(P, Eigen::VectorXd::Zero(dim), L, eq_rhs, z, xi_mult)) {
      return {std::numeric_limits<double>::infinity(), false};
    }
    return {0.5 * z.dot(P * z), true};
  }

  CoreProblem core;
  core.P = P;
  core.q = Eigen::VectorXd::Zero(dim);
  const Eigen::Index rows = eq_rows + ineq_at + soc_at;
  std::vector<Eigen::Triplet<double>> all_trips = c_trips;
  for (const auto & t : ineq_trips) {
    all_trips.emplace_back(eq_rows + t.row(), t.col(), t.value());
  }
  for (const auto & t : soc_trips) {
    all_trips.emplace_back(eq_rows + ineq_at + t.row(), t.col(), t.value());
  }
  core.C.resize(rows, dim);
  core.C.setFromTriplets(all_trips.begin(), all_trips.end());
  core.cone.eq_rhs = eq_rhs;
  core.cone.ineq_bound =
    Eigen::Map<const Eigen::VectorXd>(ineq_bounds.data(), static_cast<Eigen::Index>(ineq_bounds.size()));
  core.cone.soc_size = soc_size;
  core.cone.soc_radius = soc_radius;

  CoreParams prm;
  prm.tol_abs = prm.tol_rel = tol;
  prm.max_iter = 100000;
  const CoreResult res = admm_solve(core, prm);
  if (res.status == SolveStatus::Infeasible) {
    return {std::numeric_limits<double>::infinity(), false};
  }
  return {0.5 * res.z.dot(P * res.z), true};
}

}  // namespace detail

/**
 * @brief Collocation reference value with N and 2N Richardson comparison.
 *
 * Returns the 2N-interval value; the convergence estimate is the N-vs-2N
 * difference (about three times the extrapolated error of the finer grid,
 * trapezoidal rule being second order). The converged flag clears when the
 * two grids disagree by more than 1% of the value, meaning the h^2 regime
 * was not reached.
 */
inline CollocationResult collocation_cost(
  const LtiProblem & prob, double T, int N, double tol = 1e-8)
{
  if (!(T > 0.0)) { throw std::invalid_argument("collocation_cost: T must be positive"); }
  if (N < 10) { throw std::invalid_argument("collocation_cost: need at least 10 intervals"); }
  prob.validate();

  const RiccatiSolution care = solve_care(prob.A, prob.B);

  CollocationResult result;
  const auto [coarse, ok_coarse] = detail::collocation_value(prob, care.P, T, N, tol);
  const auto [fine, ok_fine] = detail::collocation_value(prob, care.P, T, 2 * N, tol);
  result.feasible = ok_coarse && ok_fine;
  if (!result.feasible) { return result; }

  result.cost = fine;
  result.convergence_estimate = std::abs(coarse - fine);
  result.converged = result.convergence_estimate <= 1e-2 * (1.0 + std::abs(fine));
  return result;
}

}  // namespace galcert
