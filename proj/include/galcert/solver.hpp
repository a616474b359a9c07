#pragma once

/**
 * @file solver.hpp
 * @brief Convex QP solvers for the assembled trajectory problems.
 *
 * Two solve layers:
 *  - solve_equality_qp: exact rank-revealing KKT solve for problems with only
 *    equality constraints (the unconstrained trajectory problems),
 *  - solve_conic_qp: ADMM operator splitting over the halfspace/cone product
 *    with active-set polishing, for the constrained problems.
 *
 * Multiplier sign convention throughout: the Lagrangian is
 *   1/2 |z|^2 + lambda^T (E z - rhs) + mu^T (A z - b) + sum_j (y_j^T W_j z - |y_j| r_j),
 * so dual trajectories reconstructed from dual_eq realize the dual problem's
 * supremum form directly.
 */

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "galcert/coefficient_set.hpp"
#include "galcert/galerkin.hpp"

namespace galcert {

enum class SolveStatus { Optimal, Infeasible, MaxIter };

/**
 * @brief Quadratic program with identity Hessian over stacked coefficients.
 *
 * Cost is fixed to 1/2 |z|^2 (the trajectory L2 energy under orthonormality),
 * which is strongly convex, so the minimizer is unique whenever feasible.
 */
struct ConicProgram
{
  Eigen::Index dim = 0;
  EqualitySystem equality;      ///< E_x eta_x + E_u eta_u = rhs over z = (eta_x, eta_u)
  CoefficientSet inequalities;  ///< halfspace/cone rows, already in stacked coordinates

  Eigen::Index equality_rows() const { return equality.rhs.size(); }

  /// Stacked equality matrix [E_x  E_u].
  Eigen::MatrixXd equality_matrix() const
  {
    Eigen::MatrixXd E(equality.rhs.size(), dim);
    E.leftCols(equality.E_x.cols()) = equality.E_x;
    E.rightCols(equality.E_u.cols()) = equality.E_u;
    return E;
  }
};

/// Primal/dual solution of a ConicProgram.
struct Solution
{
  Eigen::VectorXd z;
  Eigen::VectorXd dual_eq;                ///< multipliers on equality rows
  Eigen::VectorXd dual_ineq;              ///< multipliers on linear inequality rows
  std::vector<Eigen::VectorXd> dual_soc;  ///< multipliers on cone blocks
  SolveStatus status = SolveStatus::MaxIter;
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double objective = std::numeric_limits<double>::infinity();
  bool rank_deficient = false;  ///< minimum-norm multipliers were selected
  int iterations = 0;
};

namespace detail {

/// Cone description for the stacked constraint rows of the splitting solver.
struct ConeSpec
{
  Eigen::VectorXd eq_rhs;      // rows 0..k_e: v = eq_rhs
  Eigen::VectorXd ineq_bound;  // next k_i rows: v <= bound
  std::vector<Eigen::Index> soc_size;  // remaining rows in blocks
  std::vector<double> soc_radius;      // |v_block| <= radius

  Eigen::Index eq_rows() const { return eq_rhs.size(); }
  Eigen::Index ineq_rows() const { return ineq_bound.size(); }
  Eigen::Index total_rows() const
  {
    Eigen::Index r = eq_rows() + ineq_rows();
    for (const auto s : soc_size) { r += s; }
    return r;
  }

  /// Euclidean projection onto the product set (blockwise).
  void project(Eigen::VectorXd & v) const
  {
    v.head(eq_rows()) = eq_rhs;
    v.segment(eq_rows(), ineq_rows()) = v.segment(eq_rows(), ineq_rows()).cwiseMin(ineq_bound);
    Eigen::Index at = eq_rows() + ineq_rows();
    for (std::size_t j = 0; j < soc_size.size(); ++j) {
      auto block = v.segment(at, soc_size[j]);
      const double norm = block.norm();
      if (norm > soc_radius[j]) { block *= soc_radius[j] / norm; }
      at += soc_size[j];
    }
  }
};

/// General core problem: 1/2 z^T P z + q^T z s.t. C z in the cone product.
struct CoreProblem
{
  Eigen::SparseMatrix<double> P;
  Eigen::VectorXd q;
  Eigen::SparseMatrix<double> C;
  ConeSpec cone;
};

struct CoreParams
{
  double tol_abs = 1e-8;
  double tol_rel = 1e-8;
  int max_iter = 50000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  int check_every = 25;
  bool adaptive_rho = true;
  bool polish = true;
  double inf_tol = 1e-10;  // infeasibility certificate threshold
};

struct CoreResult
{
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  // multipliers on all rows, Lagrangian sign convention
  SolveStatus status = SolveStatus::MaxIter;
  double prim_res = std::numeric_limits<double>::infinity();
  double dual_res = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool polished = false;
};

/**
 * Solve the regularized sparse KKT system
 *   [P + d I   L^T ] [z ]   [-q]
 *   [L        -d I ] [xi] = [ d_rhs]
 * with a few iterative-refinement sweeps against the unregularized system.
 */
inline bool solve_kkt_sparse(
  const Eigen::SparseMatrix<double> & P,
  const Eigen::VectorXd & q,
  const Eigen::SparseMatrix<double> & L,
  const Eigen::VectorXd & d_rhs,
  Eigen::VectorXd & z,
  Eigen::VectorXd & xi,
  double reg = 1e-9)
{
  const Eigen::Index n = P.rows(), k = L.rows();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(P.nonZeros() + 2 * L.nonZeros() + n + k);
  for (int col = 0; col < P.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(P, col); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) { trips.emplace_back(i, i, reg); }
  for (int col = 0; col < L.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, col); it; ++it) {
      trips.emplace_back(n + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n + it.row(), it.value());
    }
  }
  for (Eigen::Index i = 0; i < k; ++i) { trips.emplace_back(n + i, n + i, -reg); }

  Eigen::SparseMatrix<double> kkt(n + k, n + k);
  kkt.setFromTriplets(trips.begin(), trips.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(kkt);
  if (lu.info() != Eigen::Success) { return false; }

  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = -q;
  rhs.tail(k) = d_rhs;

  Eigen::VectorXd sol = lu.solve(rhs);
  // refine against the unregularized KKT operator
  for (int sweep = 0; sweep < 3; ++sweep) {
    Eigen::VectorXd resid = rhs;
    resid.head(n) -= P * sol.head(n) + L.transpose() * sol.tail(k);
    resid.tail(k) -= L * sol.head(n);
    sol += lu.solve(resid);
  }
  if (!sol.allFinite()) { return false; }
  z = sol.head(n);
  xi = sol.tail(k);
  return true;
}

/**
 * Active-set polish of an ADMM iterate: re-solve on the equality rows plus
 * the detected active halfspaces/cones, then verify the full KKT conditions
 * at the requested tolerance. Returns false (leaving the result untouched)
 * when detection or verification fails.
 */
inline bool polish_iterate(
  const CoreProblem & prob, const CoreParams & prm, CoreResult & res, double eps_p, double eps_d)
{
  const Eigen::Index n = prob.P.rows();
  const Eigen::Index ke = prob.cone.eq_rows();
  const Eigen::Index ki = prob.cone.ineq_rows();
  const Eigen::VectorXd v = prob.C * res.z;

  const double lam_scale = 1.0 + res.lambda.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < ki; ++i) {
    const bool dual_on = res.lambda(ke + i) > 1e-9 * lam_scale;
    const bool slack_tight = prob.cone.ineq_bound(i) - v(ke + i) < 1e-7 * lam_scale;
    if (dual_on || slack_tight) { active.push_back(i); }
  }
  Eigen::Index at = ke + ki;
  std::vector<std::size_t> active_soc;
  for (std::size_t j = 0; j < prob.cone.soc_size.size(); ++j) {
    const double norm = v.segment(at, prob.cone.soc_size[j]).norm();
    const double dual_norm = res.lambda.segment(at, prob.cone.soc_size[j]).norm();
    if (dual_norm > 1e-9 * lam_scale && norm > prob.cone.soc_radius[j] * (1.0 - 1e-6)) {
      active_soc.push_back(j);
    }
    at += prob.cone.soc_size[j];
  }

  Eigen::VectorXd z_new = res.z;
  Eigen::VectorXd lambda_new = Eigen::VectorXd::Zero(res.lambda.size());

  if (active_soc.empty()) {
    // single linear KKT solve on [equality; active halfspaces]
    const Eigen::Index ka = static_cast<Eigen::Index>(active.size());
    const Eigen::SparseMatrix<double, Eigen::RowMajor> C_rm(prob.C);
    Eigen::SparseMatrix<double> L(ke + ka, n);
    {
      std::vector<Eigen::Triplet<double>> trips;
      for (Eigen::Index r = 0; r < ke; ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(C_rm, r); it; ++it) {
          trips.emplace_back(r, it.col(), it.value());
        }
      }
      for (Eigen::Index r = 0; r < ka; ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(C_rm, ke + active[r]);
             it; ++it) {
          trips.emplace_back(ke + r, it.col(), it.value());
        }
      }
      L.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::VectorXd d(ke + ka);
    d.head(ke) = prob.cone.eq_rhs;
    for (Eigen::Index r = 0; r < ka; ++r) { d(ke + r) = prob.cone.ineq_bound(active[r]); }

    Eigen::VectorXd xi;
    if (!solve_kkt_sparse(prob.P, prob.q, L, d, z_new, xi)) { return false; }
    lambda_new.head(ke) = xi.head(ke);
    for (Eigen::Index r = 0; r < ka; ++r) { lambda_new(ke + active[r]) = xi(ke + r); }
  } else {
    // Newton on the KKT system with active cones in squared form; problems
    // reaching this branch are small, assemble dense
    const Eigen::Index ka = static_cast<Eigen::Index>(active.size());
    const Eigen::Index kc = static_cast<Eigen::Index>(active_soc.size());
    const Eigen::MatrixXd C_dense(prob.C);
    Eigen::MatrixXd L(ke + ka, n);
    Eigen::VectorXd d(ke + ka);
    L.topRows(ke) = C_dense.topRows(ke);
    d.head(ke) = prob.cone.eq_rhs;
    for (Eigen::Index r = 0; r < ka; ++r) {
      L.row(ke + r) = C_dense.row(ke + active[r]);
      d(ke + r) = prob.cone.ineq_bound(active[r]);
    }
    std::vector<Eigen::MatrixXd> Wj;
    std::vector<double> rj;
    std::vector<Eigen::Index> row0j;
    for (const auto j : active_soc) {
      Eigen::Index row0 = ke + ki;
      for (std::size_t jj = 0; jj < j; ++jj) { row0 += prob.cone.soc_size[jj]; }
      Wj.push_back(C_dense.middleRows(row0, prob.cone.soc_size[j]));
      rj.push_back(prob.cone.soc_radius[j]);
      row0j.push_back(row0);
    }

    Eigen::VectorXd xi(ke + ka);
    xi.head(ke) = res.lambda.head(ke);
    for (Eigen::Index r = 0; r < ka; ++r) { xi(ke + r) = res.lambda(ke + active[r]); }
    Eigen::VectorXd nu(kc);
    for (Eigen::Index j = 0; j < kc; ++j) {
      nu(j) = res.lambda.segment(row0j[j], Wj[j].rows()).norm() / std::max(rj[j], 1e-300);
    }

    const Eigen::Index total = n + ke + ka + kc;
    for (int newton = 0; newton < 50; ++newton) {
      Eigen::VectorXd F(total);
      Eigen::VectorXd grad = prob.P * z_new + prob.q + L.transpose() * xi;
      for (Eigen::Index j = 0; j < kc; ++j) { grad += nu(j) * Wj[j].transpose() * (Wj[j] * z_new); }
      F.head(n) = grad;
      F.segment(n, ke + ka) = L * z_new - d;
      for (Eigen::Index j = 0; j < kc; ++j) {
        F(n + ke + ka + j) = 0.5 * ((Wj[j] * z_new).squaredNorm() - rj[j] * rj[j]);
      }
      if (F.cwiseAbs().maxCoeff() < 0.1 * std::min(eps_p, eps_d)) { break; }

      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(total, total);
      Eigen::MatrixXd H = Eigen::MatrixXd(prob.P);
      for (Eigen::Index j = 0; j < kc; ++j) { H += nu(j) * Wj[j].transpose() * Wj[j]; }
      J.topLeftCorner(n, n) = H;
      J.block(0, n, n, ke + ka) = L.transpose();
      J.block(n, 0, ke + ka, n) = L;
      for (Eigen::Index j = 0; j < kc; ++j) {
        const Eigen::VectorXd g = Wj[j].transpose() * (Wj[j] * z_new);
        J.block(0, n + ke + ka + j, n, 1) = g;
        J.block(n + ke + ka + j, 0, 1, n) = g.transpose();
      }
      const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
      if (!step.allFinite()) { return false; }
      z_new += step.head(n);
      xi += step.segment(n, ke + ka);
      nu += step.tail(kc);
    }
    if ((nu.array() < -1e-9).any()) { return false; }

    lambda_new.head(ke) = xi.head(ke);
    for (Eigen::Index r = 0; r < ka; ++r) { lambda_new(ke + active[r]) = xi(ke + r); }
    for (Eigen::Index j = 0; j < kc; ++j) {
      lambda_new.segment(row0j[j], Wj[j].rows()) = nu(j) * (Wj[j] * z_new);
    }
  }

  // verify full KKT at the polished point
  const Eigen::VectorXd v_new = prob.C * z_new;
  double prim = ke > 0 ? (v_new.head(ke) - prob.cone.eq_rhs).cwiseAbs().maxCoeff() : 0.0;
  if (ki > 0) {
    prim = std::max(
      prim, (v_new.segment(ke, ki) - prob.cone.ineq_bound).maxCoeff());
  }
  at = ke + ki;
  for (std::size_t j = 0; j < prob.cone.soc_size.size(); ++j) {
    prim = std::max(prim, v_new.segment(at, prob.cone.soc_size[j]).norm()
                            - prob.cone.soc_radius[j]);
    at += prob.cone.soc_size[j];
  }
  const double dual =
    (prob.P * z_new + prob.q + prob.C.transpose() * lambda_new).cwiseAbs().maxCoeff();
  const bool dual_sign_ok =
    ki == 0 || lambda_new.segment(ke, ki).minCoeff() > -1e-9 * lam_scale;

  if (prim <= eps_p && dual <= eps_d && dual_sign_ok) {
    res.z = z_new;
    res.lambda = lambda_new;
    res.prim_res = std::max(prim, 0.0);
    res.dual_res = dual;
    res.polished = true;
    return true;
  }
  return false;
}

/// ADMM operator splitting over the cone product, with polish.
inline CoreResult admm_solve(
  const CoreProblem & prob,
  const CoreParams & prm,
  const Eigen::VectorXd * warm_z = nullptr,
  const Eigen::VectorXd * warm_lambda = nullptr)
{
  const Eigen::Index n = prob.P.rows();
  const Eigen::Index k = prob.cone.total_rows();
  if (prob.C.rows() != k) { throw std::invalid_argument("admm_solve: cone/row mismatch"); }

  CoreResult res;
  if (k == 0) {  // unconstrained
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(prob.P);
    res.z = ldlt.solve(-prob.q);
    res.lambda.resize(0);
    res.status = SolveStatus::Optimal;
    res.prim_res = 0.0;
    res.dual_res = (prob.P * res.z + prob.q).cwiseAbs().maxCoeff();
    return res;
  }

  // per-row penalties: equality rows get a stiffer rho
  const auto build_rho = [&](double base) {
    Eigen::VectorXd rho(k);
    rho.head(prob.cone.eq_rows()).setConstant(1e3 * base);
    rho.tail(k - prob.cone.eq_rows()).setConstant(base);
    return rho;
  };

  double rho_base = prm.rho;
  Eigen::VectorXd rho = build_rho(rho_base);

  Eigen::SparseMatrix<double> sigma_eye(n, n);
  sigma_eye.setIdentity();
  sigma_eye *= prm.sigma;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  const auto factorize = [&]() {
    const Eigen::SparseMatrix<double> C_scaled = rho.asDiagonal() * prob.C;
    Eigen::SparseMatrix<double> K = prob.C.transpose() * C_scaled;
    K += prob.P;
    K += sigma_eye;
    ldlt.compute(K);
    return ldlt.info() == Eigen::Success;
  };
  if (!factorize()) { throw std::runtime_error("admm_solve: factorization failed"); }

  Eigen::VectorXd z = warm_z ? *warm_z : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lambda = warm_lambda ? *warm_lambda : Eigen::VectorXd::Zero(k);
  Eigen::VectorXd y = prob.C * z;
  prob.cone.project(y);

  Eigen::VectorXd lambda_checkpoint = lambda;
  const double bound_scale = std::max(
    {prob.cone.eq_rhs.size() > 0 ? prob.cone.eq_rhs.cwiseAbs().maxCoeff() : 0.0,
     prob.cone.ineq_bound.size() > 0 ? prob.cone.ineq_bound.cwiseAbs().maxCoeff() : 0.0, 1.0});

  int iter = 0;
  for (; iter < prm.max_iter; ++iter) {
    // z-step
    const Eigen::VectorXd rhs =
      prm.sigma * z - prob.q + prob.C.transpose() * (rho.cwiseProduct(y) - lambda);
    z = ldlt.solve(rhs);

    // relaxed y / lambda steps
    const Eigen::VectorXd v = prob.C * z;
    const Eigen::VectorXd v_hat = prm.alpha * v + (1.0 - prm.alpha) * y;
    Eigen::VectorXd y_next = v_hat + lambda.cwiseQuotient(rho);
    prob.cone.project(y_next);
    lambda += rho.cwiseProduct(v_hat - y_next);
    y = y_next;

    if ((iter + 1) % prm.check_every != 0) { continue; }

    const double prim = (v - y).cwiseAbs().maxCoeff();
    const double dual_raw =
      (prob.P * z + prob.q + prob.C.transpose() * lambda).cwiseAbs().maxCoeff();
    const double eps_p = prm.tol_abs
                       + prm.tol_rel * std::max({v.cwiseAbs().maxCoeff(),
                                                 y.cwiseAbs().maxCoeff(), bound_scale});
    const double eps_d = prm.tol_abs
                       + prm.tol_rel
                           * std::max({(prob.P * z).cwiseAbs().maxCoeff(),
                                       (prob.C.transpose() * lambda).cwiseAbs().maxCoeff(),
                                       prob.q.size() > 0 ? prob.q.cwiseAbs().maxCoeff() : 0.0});

    res.z = z;
    res.lambda = lambda;
    res.prim_res = prim;
    res.dual_res = dual_raw;
    res.iterations = iter + 1;

    if (prim <= eps_p && dual_raw <= eps_d) {
      res.status = SolveStatus::Optimal;
      if (prm.polish) { polish_iterate(prob, prm, res, eps_p, eps_d); }
      return res;
    }

    // early polish attempt once the iterate is roughly converged
    if (prm.polish && prim <= 1e4 * eps_p && dual_raw <= 1e4 * eps_d) {
      if (polish_iterate(prob, prm, res, eps_p, eps_d)) {
        res.status = SolveStatus::Optimal;
        return res;
      }
    }

    // primal infeasibility certificate from the dual update direction
    const Eigen::VectorXd dlam = lambda - lambda_checkpoint;
    const double dlam_norm = dlam.cwiseAbs().maxCoeff();
    if (dlam_norm > prm.inf_tol) {
      const double ctd = (prob.C.transpose() * dlam).cwiseAbs().maxCoeff();
      bool cert = ctd <= prm.inf_tol * dlam_norm * 1e2;
      double support = prob.cone.eq_rhs.dot(dlam.head(prob.cone.eq_rows()));
      for (Eigen::Index i = 0; i < prob.cone.ineq_rows(); ++i) {
        const double d = dlam(prob.cone.eq_rows() + i);
        if (d < -prm.inf_tol * dlam_norm) { cert = false; break; }
        support += prob.cone.ineq_bound(i) * std::max(d, 0.0);
      }
      Eigen::Index at = prob.cone.eq_rows() + prob.cone.ineq_rows();
      for (std::size_t j = 0; j < prob.cone.soc_size.size(); ++j) {
        support += prob.cone.soc_radius[j] * dlam.segment(at, prob.cone.soc_size[j]).norm();
        at += prob.cone.soc_size[j];
      }
      if (cert && support < -prm.inf_tol * dlam_norm) {
        res.status = SolveStatus::Infeasible;
        return res;
      }
    }
    lambda_checkpoint = lambda;

    // adaptive penalty
    if (prm.adaptive_rho) {
      const double ratio = std::sqrt(
        (prim / std::max(eps_p, 1e-300)) / std::max(dual_raw / std::max(eps_d, 1e-300), 1e-300));
      if (ratio > 5.0 || ratio < 0.2) {
        rho_base = std::clamp(rho_base * std::clamp(ratio, 0.02, 50.0), 1e-6, 1e6);
        rho = build_rho(rho_base);
        if (!factorize()) { throw std::runtime_error("admm_solve: refactorization failed"); }
      }
    }
  }

  res.z = z;
  res.lambda = lambda;
  const Eigen::VectorXd v_final = prob.C * z;
  res.prim_res = (v_final - y).cwiseAbs().maxCoeff();
  res.dual_res = (prob.P * z + prob.q + prob.C.transpose() * lambda).cwiseAbs().maxCoeff();
  res.iterations = iter;
  res.status = SolveStatus::MaxIter;
  return res;
}

/// Assemble the stacked core problem for a ConicProgram (identity cost).
inline CoreProblem to_core(const ConicProgram & prog)
{
  CoreProblem core;
  core.P.resize(prog.dim, prog.dim);
  core.P.setIdentity();
  core.q = Eigen::VectorXd::Zero(prog.dim);

  const Eigen::Index ke = prog.equality_rows();
  const Eigen::Index ki = prog.inequalities.linear_rows();
  Eigen::Index rows = ke + ki;
  for (const auto & cone : prog.inequalities.soc) { rows += cone.W.rows(); }

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(rows, prog.dim);
  if (ke > 0) { C.topRows(ke) = prog.equality_matrix(); }
  for (Eigen::Index i = 0; i < ki; ++i) {
    C.row(ke + i) = prog.inequalities.linear[static_cast<std::size_t>(i)].a.transpose();
  }
  Eigen::Index at = ke + ki;
  core.cone.soc_size.reserve(prog.inequalities.soc.size());
  core.cone.soc_radius.reserve(prog.inequalities.soc.size());
  for (const auto & cone : prog.inequalities.soc) {
    C.middleRows(at, cone.W.rows()) = cone.W;
    core.cone.soc_size.push_back(cone.W.rows());
    core.cone.soc_radius.push_back(cone.bound);
    at += cone.W.rows();
  }
  core.C = C.sparseView();

  core.cone.eq_rhs = prog.equality.rhs;
  core.cone.ineq_bound.resize(ki);
  for (Eigen::Index i = 0; i < ki; ++i) {
    core.cone.ineq_bound(i) = prog.inequalities.linear[static_cast<std::size_t>(i)].b;
  }
  return core;
}

inline Solution from_core(const ConicProgram & prog, const CoreResult & core)
{
  Solution sol;
  sol.z = core.z;
  sol.status = core.status;
  sol.primal_residual = core.prim_res;
  sol.dual_residual = core.dual_res;
  sol.iterations = core.iterations;
  sol.objective = core.status == SolveStatus::Infeasible
                    ? std::numeric_limits<double>::infinity()
                    : 0.5 * core.z.squaredNorm();

  const Eigen::Index ke = prog.equality_rows();
  const Eigen::Index ki = prog.inequalities.linear_rows();
  if (core.lambda.size() > 0) {
    sol.dual_eq = core.lambda.head(ke);
    sol.dual_ineq = core.lambda.segment(ke, ki);
    Eigen::Index at = ke + ki;
    for (const auto & cone : prog.inequalities.soc) {
      sol.dual_soc.push_back(core.lambda.segment(at, cone.W.rows()));
      at += cone.W.rows();
    }
  }
  return sol;
}

}  // namespace detail

/**
 * @brief Exact solve of a ConicProgram with no inequality constraints.
 *
 * Solves the KKT saddle system through rank-revealing orthogonal
 * factorizations: the primal minimizer is the minimum-norm solution of
 * E z = rhs (which minimizes 1/2 |z|^2 exactly), the multipliers solve
 * E^T lambda = -z with minimum norm when rows are redundant (flagged).
 * An inconsistent equality system yields status Infeasible.
 */
inline Solution solve_equality_qp(const ConicProgram & prog, double feas_tol = 1e-9)
{
  if (!prog.inequalities.empty()) {
    throw std::invalid_argument("solve_equality_qp: program has inequality constraints");
  }

  const Eigen::MatrixXd E = prog.equality_matrix();
  const Eigen::VectorXd & rhs = prog.equality.rhs;

  Solution sol;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(E);
  sol.z = cod.solve(rhs);
  sol.rank_deficient = cod.rank() < E.rows();

  sol.primal_residual = (E * sol.z - rhs).cwiseAbs().maxCoeff();
  const double scale = 1.0 + rhs.cwiseAbs().maxCoeff() + sol.z.cwiseAbs().maxCoeff();
  if (sol.primal_residual > feas_tol * scale) {
    sol.status = SolveStatus::Infeasible;
    sol.objective = std::numeric_limits<double>::infinity();
    return sol;
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> codT(E.transpose());
  sol.dual_eq = codT.solve(-sol.z);
  sol.dual_ineq.resize(0);
  sol.dual_residual = (sol.z + E.transpose() * sol.dual_eq).cwiseAbs().maxCoeff();
  sol.objective = 0.5 * sol.z.squaredNorm();
  sol.status = SolveStatus::Optimal;
  return sol;
}

/**
 * @brief Solve a ConicProgram by ADMM operator splitting with polish.
 *
 * Terminates when max-norm primal and dual residuals fall below
 * tol (absolute) + tol (relative); infeasibility is detected through a
 * divergence certificate of the dual update direction. On MaxIter the best
 * iterate and its residuals are returned.
 */
inline Solution solve_conic_qp(
  const ConicProgram & prog,
  double tol = 1e-8,
  int max_iter = 50000,
  const Solution * warm_start = nullptr)
{
  detail::CoreProblem core = detail::to_core(prog);
  detail::CoreParams prm;
  prm.tol_abs = tol;
  prm.tol_rel = tol;
  prm.max_iter = max_iter;

  Eigen::VectorXd warm_lambda;
  const Eigen::VectorXd * wz = nullptr;
  const Eigen::VectorXd * wl = nullptr;
  if (warm_start != nullptr && warm_start->z.size() == prog.dim) {
    wz = &warm_start->z;
    if (warm_start->dual_eq.size() + warm_start->dual_ineq.size() > 0) {
      warm_lambda.resize(core.C.rows());
      warm_lambda.setZero();
      warm_lambda.head(warm_start->dual_eq.size()) = warm_start->dual_eq;
      warm_lambda.segment(warm_start->dual_eq.size(), warm_start->dual_ineq.size()) =
        warm_start->dual_ineq;
      Eigen::Index at = warm_start->dual_eq.size() + warm_start->dual_ineq.size();
      for (const auto & y : warm_start->dual_soc) {
        warm_lambda.segment(at, y.size()) = y;
        at += y.size();
      }
      wl = &warm_lambda;
    }
  }

  return detail::from_core(prog, detail::admm_solve(core, prm, wz, wl));
}

/**
 * @brief Primal objective minus the Lagrangian dual objective at the
 * solution's multipliers.
 *
 * For cost 1/2 |z|^2 the dual function evaluates in closed form,
 *   g = -1/2 |E^T lambda + A^T mu + sum_j W_j^T y_j|^2
 *       - lambda^T rhs - mu^T b - sum_j |y_j| r_j,
 * with mu clamped to the nonnegative orthant so the evaluation point is dual
 * feasible. Nonnegative by weak duality at primal-feasible points and
 * ~tol at an optimum; at a primal-infeasible iterate (MaxIter) the raw
 * difference can have either sign but stays away from zero.
 */
inline double duality_gap(const ConicProgram & prog, const Solution & sol)
{
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(prog.dim);
  double linear_part = 0.0;

  if (sol.dual_eq.size() > 0) {
    grad += prog.equality_matrix().transpose() * sol.dual_eq;
    linear_part += sol.dual_eq.dot(prog.equality.rhs);
  }
  for (Eigen::Index i = 0; i < sol.dual_ineq.size(); ++i) {
    const double mu = std::max(sol.dual_ineq(i), 0.0);
    const auto & row = prog.inequalities.linear[static_cast<std::size_t>(i)];
    grad += mu * row.a;
    linear_part += mu * row.b;
  }
  for (std::size_t j = 0; j < sol.dual_soc.size(); ++j) {
    const auto & cone = prog.inequalities.soc[j];
    grad += cone.W.transpose() * sol.dual_soc[j];
    linear_part += sol.dual_soc[j].norm() * cone.bound;
  }

  const double dual_value = -0.5 * grad.squaredNorm() - linear_part;
  return sol.objective - dual_value;
}

}  // namespace galcert
