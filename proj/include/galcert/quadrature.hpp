#pragma once

/**
 * @file quadrature.hpp
 * @brief Gauss-Laguerre quadrature rules for integrals over [0, inf).
 */

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace galcert {

/// Nodes and weights of a quadrature rule on [0, inf).
struct QuadratureRule
{
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  /// Integrate a callable f: double -> double over [0, inf).
  template<typename F>
  double integrate(F && f) const
  {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < nodes.size(); ++k) { acc += weights(k) * f(nodes(k)); }
    return acc;
  }
};

namespace detail {

/// Scaled Laguerre function L_k(u) e^{-u/2} via the bounded three-term recurrence.
inline double scaled_laguerre(int k, double u)
{
  double fm1 = 0.0;
  double f = std::exp(-0.5 * u);
  for (int j = 0; j < k; ++j) {
    const double fp1 = ((2.0 * j + 1.0 - u) * f - j * fm1) / (j + 1.0);
    fm1 = f;
    f = fp1;
  }
  return f;
}

/// Scaled function and its derivative, for Newton refinement of the nodes.
inline std::pair<double, double> scaled_laguerre_with_derivative(int k, double u)
{
  double fm1 = 0.0;
  double f = std::exp(-0.5 * u);
  for (int j = 0; j < k; ++j) {
    const double fp1 = ((2.0 * j + 1.0 - u) * f - j * fm1) / (j + 1.0);
    fm1 = f;
    f = fp1;
  }
  // u L_k' = k (L_k - L_{k-1}); the e^{-u/2} scaling adds -f/2
  const double df = k > 0 ? k * (f - fm1) / u - 0.5 * f : -0.5 * f;
  return {f, df};
}

/**
 * Gauss-Laguerre nodes and e^{+u}-scaled weights.
 *
 * Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix
 * (diagonal 2k+1, off-diagonal k). Weights come from the classical formula
 *
 *   w_k = u_k / ((n+1) L_{n+1}(u_k))^2,
 *
 * evaluated on the scaled functions so that w_k e^{u_k} is formed directly;
 * the eigenvector-based route loses the small weights to underflow noise at
 * orders beyond a few tens.
 */
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_laguerre_scaled(int order)
{
  if (order < 1) { throw std::invalid_argument("gauss_laguerre: order must be >= 1"); }

  Eigen::VectorXd diag(order), subdiag(std::max(order - 1, 0));
  for (int k = 0; k < order; ++k) { diag(k) = 2.0 * k + 1.0; }
  for (int k = 1; k < order; ++k) { subdiag(k - 1) = static_cast<double>(k); }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, subdiag, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("gauss_laguerre: tridiagonal eigensolve failed");
  }

  Eigen::VectorXd nodes = es.eigenvalues();
  Eigen::VectorXd scaled(order);
  for (int k = 0; k < order; ++k) {
    double u = nodes(k);
    // eigenvalues carry ~eps*||J|| absolute error, which the weight formula
    // amplifies; a couple of Newton steps on L_order restore full precision
    for (int it = 0; it < 3; ++it) {
      const auto [f, df] = scaled_laguerre_with_derivative(order, u);
      const double step = f / df;
      u -= step;
      if (std::abs(step) < 1e-15 * u) { break; }
    }
    nodes(k) = u;
    const double fnext = (order + 1.0) * scaled_laguerre(order + 1, u);
    scaled(k) = u / (fnext * fnext);
  }
  return {std::move(nodes), std::move(scaled)};
}

}  // namespace detail

/**
 * @brief Gauss-Laguerre rule for integrals of the form int_0^inf g(u) e^{-u} du.
 *
 * The weight function e^{-u} is implicit: sum_k w_k g(u_k) ~ int g(u) e^{-u} du,
 * exact for polynomials g of degree <= 2*order - 1. Weights at extreme nodes
 * may underflow to zero for orders beyond ~300.
 */
inline QuadratureRule gauss_laguerre(int order)
{
  auto [nodes, scaled] = detail::gauss_laguerre_scaled(order);
  QuadratureRule rule;
  rule.weights.resize(order);
  for (int k = 0; k < order; ++k) { rule.weights(k) = scaled(k) * std::exp(-nodes(k)); }
  rule.nodes = std::move(nodes);
  return rule;
}

/**
 * @brief Quadrature rule for int_0^inf f(t) dt with f decaying like poly * e^{-2pt}.
 *
 * Substitutes u = 2pt into the Gauss-Laguerre rule and folds the e^{+u}
 * compensation into the weights. Exact for f(t) = q(t) e^{-2pt} with q
 * polynomial of degree <= 2*order - 1; in particular products of the first
 * `order` scaled Laguerre basis functions.
 */
inline QuadratureRule exp_decay_rule(double p, int order)
{
  if (!(p > 0.0)) { throw std::invalid_argument("exp_decay_rule: p must be positive"); }
  auto [nodes, scaled] = detail::gauss_laguerre_scaled(order);
  QuadratureRule rule;
  rule.nodes = nodes / (2.0 * p);
  rule.weights = scaled / (2.0 * p);
  return rule;
}

}  // namespace galcert
