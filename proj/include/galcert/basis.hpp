#pragma once

/**
 * @file basis.hpp
 * @brief Orthonormal exponential basis on [0, inf) realized as scaled Laguerre functions.
 *
 * The i-th basis function (i = 1..s) is
 *
 *   tau_i(t) = sqrt(2p) * L_{i-1}(2pt) * e^{-pt},
 *
 * an orthonormal family of L^2[0, inf) that is closed under differentiation:
 * tau'(t) = M tau(t) with a lower-triangular generator M. The generator
 * satisfies the integration-by-parts identity M + M^T + tau(0) tau(0)^T = 0
 * exactly, which downstream constraint assembly relies on.
 */

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "galcert/quadrature.hpp"

namespace galcert {

/// Maximum supported basis size; orthonormality in double degrades beyond this.
inline constexpr int kMaxBasisSize = 200;

/**
 * @brief Orthonormal exponential basis of size s with decay rate p.
 *
 * Immutable after construction via make_basis(); all member data is value
 * semantic and safe for concurrent reads.
 */
struct BasisSpec
{
  double p = 1.0;          ///< decay rate (1/time)
  int s = 1;               ///< number of basis functions
  Eigen::MatrixXd M;       ///< s x s generator, tau' = M tau
  Eigen::VectorXd tau0;    ///< tau(0)
};

/**
 * @brief Construct the basis of size s with decay rate p.
 *
 * M is lower triangular with diagonal -p and strictly-lower entries -2p;
 * tau(0) has every entry sqrt(2p). Throws std::invalid_argument on p <= 0,
 * s < 1, or s > kMaxBasisSize.
 */
inline BasisSpec make_basis(double p, int s)
{
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("make_basis: decay rate p must be positive and finite");
  }
  if (s < 1) { throw std::invalid_argument("make_basis: basis size s must be >= 1"); }
  if (s > kMaxBasisSize) {
    throw std::invalid_argument(
      "make_basis: basis size s exceeds cap " + std::to_string(kMaxBasisSize));
  }

  BasisSpec spec;
  spec.p = p;
  spec.s = s;
  spec.M.setZero(s, s);
  for (int i = 0; i < s; ++i) {
    spec.M(i, i) = -p;
    for (int j = 0; j < i; ++j) { spec.M(i, j) = -2.0 * p; }
  }
  spec.tau0 = Eigen::VectorXd::Constant(s, std::sqrt(2.0 * p));
  return spec;
}

/**
 * @brief Evaluate tau(t) = (tau_1(t), ..., tau_s(t)).
 *
 * Uses the three-term recurrence on the exponentially scaled functions
 * f_k(z) = L_k(z) e^{-z/2},
 *
 *   f_{k+1} = ((2k+1-z) f_k - k f_{k-1}) / (k+1),
 *
 * which keeps every intermediate bounded; a naive monomial expansion of
 * L_k overflows for s of a few tens.
 */
inline Eigen::VectorXd eval_basis(const BasisSpec & spec, double t)
{
  if (!std::isfinite(t)) { throw std::domain_error("eval_basis: t must be finite"); }
  if (t < 0.0) { throw std::domain_error("eval_basis: t must be nonnegative"); }

  const double z = 2.0 * spec.p * t;
  const double scale = std::sqrt(2.0 * spec.p);

  Eigen::VectorXd tau(spec.s);
  double fkm1 = 0.0;
  double fk = std::exp(-0.5 * z);  // f_0
  tau(0) = scale * fk;
  for (int k = 0; k + 1 < spec.s; ++k) {
    const double fkp1 = ((2.0 * k + 1.0 - z) * fk - k * fkm1) / (k + 1.0);
    tau(k + 1) = scale * fkp1;
    fkm1 = fk;
    fk = fkp1;
  }
  return tau;
}

/// Evaluate tau'(t) = M tau(t).
inline Eigen::VectorXd eval_basis_derivative(const BasisSpec & spec, double t)
{
  return spec.M * eval_basis(spec, t);
}

/**
 * @brief Gram matrix int_0^inf tau tau^T dt by Gauss-Laguerre quadrature.
 *
 * The rule with `quad_order` nodes integrates products of the first
 * quad_order scaled Laguerre functions exactly, so the result is the
 * identity up to roundoff whenever quad_order >= s. Requires quad_order >= s.
 */
inline Eigen::MatrixXd gram_matrix(const BasisSpec & spec, int quad_order)
{
  if (quad_order < spec.s) {
    throw std::invalid_argument("gram_matrix: quad_order must be >= basis size");
  }
  const QuadratureRule rule = exp_decay_rule(spec.p, quad_order);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(spec.s, spec.s);
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    const Eigen::VectorXd tau = eval_basis(spec, rule.nodes(k));
    gram.noalias() += rule.weights(k) * tau * tau.transpose();
  }
  return gram;
}

/**
 * @brief int_0^inf tau(t) dt = -M^{-1} tau(0).
 *
 * Follows from integrating tau' = M tau and tau(inf) = 0. M is invertible by
 * construction (triangular, diagonal -p).
 */
inline Eigen::VectorXd basis_integral(const BasisSpec & spec)
{
  return spec.M.triangularView<Eigen::Lower>().solve(-spec.tau0);
}

}  // namespace galcert
