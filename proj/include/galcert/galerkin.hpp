#pragma once

/**
 * @file galerkin.hpp
 * @brief Finite-dimensional assembly of the upper and lower trajectory problems.
 *
 * Trajectories are parametrized coordinate-major: the coefficient vector of a
 * q-dimensional trajectory holds q blocks of s coefficients each, so that
 * x(t) = (I_q kron tau(t))^T eta. All Kronecker assembly below follows from
 * this layout.
 */

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "galcert/basis.hpp"
#include "galcert/problem.hpp"

namespace galcert {

namespace detail {

/// Dense Kronecker product.
inline Eigen::MatrixXd kron(const Eigen::MatrixXd & a, const Eigen::MatrixXd & b)
{
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace detail

/**
 * @brief Stacked basis coefficients of a q-dimensional trajectory.
 *
 * Block i (length block_size) holds the coefficients of trajectory
 * coordinate i. Under orthonormality the squared L2 norm of the trajectory
 * equals the squared Euclidean norm of coeffs.
 */
struct ParamVector
{
  Eigen::VectorXd coeffs;
  int block_size = 1;

  ParamVector() = default;
  ParamVector(Eigen::VectorXd c, int s) : coeffs(std::move(c)), block_size(s)
  {
    if (block_size < 1 || coeffs.size() % block_size != 0) {
      throw std::invalid_argument("ParamVector: length must be a positive multiple of block size");
    }
  }

  Eigen::Index num_blocks() const { return coeffs.size() / block_size; }

  auto block(Eigen::Index i) { return coeffs.segment(i * block_size, block_size); }
  auto block(Eigen::Index i) const { return coeffs.segment(i * block_size, block_size); }
};

/**
 * @brief Linear equality constraints E_x eta_x + E_u eta_u = rhs.
 *
 * The upper system has n*s dynamics rows plus n initial-condition rows; the
 * lower system has n*s rows and no separate initial-condition block.
 */
struct EqualitySystem
{
  Eigen::MatrixXd E_x;
  Eigen::MatrixXd E_u;
  Eigen::VectorXd rhs;
};

/**
 * @brief Equality constraints of the upper problem.
 *
 * Orthonormality collapses the Galerkin integral to the algebraic form
 *
 *   (A kron I_s - I_n kron M^T) eta_x + (B kron I_s) eta_u = 0,
 *   (I_n kron tau(0)^T) eta_x = x0.
 *
 * Any solution satisfies xdot = A x + B u pointwise for all t, since the
 * residual A x + B u - xdot lies in the span of the basis and is orthogonal
 * to all of it.
 */
inline EqualitySystem assemble_upper(const LtiProblem & prob, const BasisSpec & spec)
{
  prob.validate();
  const Eigen::Index n = prob.state_dim();
  const Eigen::Index m = prob.input_dim();
  const int s = spec.s;

  const Eigen::MatrixXd eye_n = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd eye_s = Eigen::MatrixXd::Identity(s, s);

  EqualitySystem sys;
  sys.E_x.setZero(n * s + n, n * s);
  sys.E_u.setZero(n * s + n, m * s);
  sys.rhs.setZero(n * s + n);

  sys.E_x.topRows(n * s) =
    detail::kron(prob.A, eye_s) - detail::kron(eye_n, spec.M.transpose());
  sys.E_u.topRows(n * s) = detail::kron(prob.B, eye_s);
  sys.E_x.bottomRows(n) = detail::kron(eye_n, spec.tau0.transpose());
  sys.rhs.tail(n) = prob.x0;
  return sys;
}

/**
 * @brief Equality constraints of the lower (weak-form) problem.
 *
 * The weak-form constraint reduces through the generator identity
 * M + M^T = -tau(0) tau(0)^T to
 *
 *   (A kron I_s + I_n kron M) eta_x + (B kron I_s) eta_u = -(I_n kron tau(0)) x0.
 */
inline EqualitySystem assemble_lower(const LtiProblem & prob, const BasisSpec & spec)
{
  prob.validate();
  const Eigen::Index n = prob.state_dim();
  const int s = spec.s;

  const Eigen::MatrixXd eye_n = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd eye_s = Eigen::MatrixXd::Identity(s, s);

  EqualitySystem sys;
  sys.E_x = detail::kron(prob.A, eye_s) + detail::kron(eye_n, spec.M);
  sys.E_u = detail::kron(prob.B, eye_s);
  sys.rhs.setZero(n * s);
  for (Eigen::Index i = 0; i < n; ++i) { sys.rhs.segment(i * s, s) = -prob.x0(i) * spec.tau0; }
  return sys;
}

/**
 * @brief Inclusion i_s: zero-pad each coordinate block to length s_to.
 *
 * Trajectory values are unchanged for all t since the appended basis
 * functions get zero coefficients.
 */
inline ParamVector include_coeffs(const ParamVector & eta, int s_to)
{
  if (s_to < eta.block_size) {
    throw std::invalid_argument("include_coeffs: target block size must be >= current");
  }
  const Eigen::Index q = eta.num_blocks();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(q * s_to);
  for (Eigen::Index i = 0; i < q; ++i) {
    out.segment(i * s_to, eta.block_size) = eta.block(i);
  }
  return ParamVector(std::move(out), s_to);
}

/// Projection pi_s: keep the first s_to coefficients of each coordinate block.
inline ParamVector truncate_project(const ParamVector & eta, int s_to)
{
  if (s_to > eta.block_size) {
    throw std::invalid_argument("truncate_project: target block size must be <= current");
  }
  const Eigen::Index q = eta.num_blocks();
  Eigen::VectorXd out(q * s_to);
  for (Eigen::Index i = 0; i < q; ++i) { out.segment(i * s_to, s_to) = eta.block(i).head(s_to); }
  return ParamVector(std::move(out), s_to);
}

/// Evaluate the trajectory x(t) = (I_q kron tau(t))^T eta.
inline Eigen::VectorXd trajectory_eval(const ParamVector & eta, const BasisSpec & spec, double t)
{
  if (eta.block_size != spec.s) {
    throw std::invalid_argument("trajectory_eval: coefficient block size does not match basis");
  }
  const Eigen::VectorXd tau = eval_basis(spec, t);
  Eigen::VectorXd out(eta.num_blocks());
  for (Eigen::Index i = 0; i < eta.num_blocks(); ++i) { out(i) = eta.block(i).dot(tau); }
  return out;
}

/// Evaluate the trajectory derivative xdot(t) = (I_q kron M tau(t))^T eta.
inline Eigen::VectorXd
trajectory_derivative_eval(const ParamVector & eta, const BasisSpec & spec, double t)
{
  if (eta.block_size != spec.s) {
    throw std::invalid_argument("trajectory_derivative_eval: block size does not match basis");
  }
  const Eigen::VectorXd dtau = eval_basis_derivative(spec, t);
  Eigen::VectorXd out(eta.num_blocks());
  for (Eigen::Index i = 0; i < eta.num_blocks(); ++i) { out(i) = eta.block(i).dot(dtau); }
  return out;
}

/// Result of projecting a function onto the basis span.
struct ProjectionResult
{
  ParamVector eta;
  bool converged = true;    ///< false when consecutive quadrature orders differ
  double rel_change = 0.0;  ///< relative change between the two quadrature orders
};

/**
 * @brief Galerkin projection pi^s(f), computed by quadrature.
 *
 * f maps t >= 0 to R^q and must be square integrable; the quadrature assumes
 * exponential-order decay. The projection is computed at `quad_order` and
 * 2*quad_order nodes and the finer result returned; the convergence flag is
 * cleared when the two differ by more than 1e-6 relative.
 */
inline ProjectionResult project_function(
  const std::function<Eigen::VectorXd(double)> & f,
  Eigen::Index q,
  const BasisSpec & spec,
  int quad_order = 64)
{
  const auto project_at = [&](int order) {
    const QuadratureRule rule = exp_decay_rule(spec.p, order);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(q * spec.s);
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
      const Eigen::VectorXd tau = eval_basis(spec, rule.nodes(k));
      const Eigen::VectorXd fv = rule.weights(k) * f(rule.nodes(k));
      for (Eigen::Index i = 0; i < q; ++i) { eta.segment(i * spec.s, spec.s) += fv(i) * tau; }
    }
    return eta;
  };

  const Eigen::VectorXd coarse = project_at(quad_order);
  Eigen::VectorXd fine = project_at(2 * quad_order);

  ProjectionResult result;
  result.rel_change = (fine - coarse).norm() / (1.0 + fine.norm());
  result.converged = result.rel_change <= 1e-6;
  result.eta = ParamVector(std::move(fine), spec.s);
  return result;
}

/**
 * @brief Max pointwise dynamics residual over a time grid.
 *
 * Returns max_k |A x(t_k) + B u(t_k) - xdot(t_k)|_2 with xdot evaluated
 * through the generator. Solutions of the upper system satisfy this to
 * solver precision; lower-problem solutions generally do not (only the weak
 * form holds there).
 */
inline double dynamics_residual(
  const ParamVector & eta_x,
  const ParamVector & eta_u,
  const LtiProblem & prob,
  const BasisSpec & spec,
  const Eigen::VectorXd & t_grid)
{
  double worst = 0.0;
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid(k);
    const Eigen::VectorXd x = trajectory_eval(eta_x, spec, t);
    const Eigen::VectorXd u = trajectory_eval(eta_u, spec, t);
    const Eigen::VectorXd xdot = trajectory_derivative_eval(eta_x, spec, t);
    worst = std::max(worst, (prob.A * x + prob.B * u - xdot).norm());
  }
  return worst;
}

}  // namespace galcert
