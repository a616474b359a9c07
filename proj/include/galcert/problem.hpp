#pragma once

/**
 * @file problem.hpp
 * @brief Problem data: LTI dynamics, initial state, and pointwise constraint sets.
 */

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace galcert {

/**
 * @brief Description of a closed convex set containing the origin.
 *
 * Either unconstrained (all of R^q), a polyhedron {x : G x <= h} with h >= 0,
 * or a Euclidean ball of radius r around the origin.
 */
struct SetDescription
{
  enum class Kind { Unconstrained, Polyhedron, Ball };

  Kind kind = Kind::Unconstrained;
  Eigen::MatrixXd G;  ///< polyhedron rows (k x q)
  Eigen::VectorXd h;  ///< polyhedron offsets, h >= 0
  double radius = 0.0;

  static SetDescription unconstrained() { return {}; }

  static SetDescription polyhedron(Eigen::MatrixXd G, Eigen::VectorXd h)
  {
    SetDescription set;
    set.kind = Kind::Polyhedron;
    set.G = std::move(G);
    set.h = std::move(h);
    return set;
  }

  static SetDescription ball(double r)
  {
    SetDescription set;
    set.kind = Kind::Ball;
    set.radius = r;
    return set;
  }

  /// Symmetric box {|x_i| <= bound_i}, a common polyhedron special case.
  static SetDescription box(const Eigen::VectorXd & bound)
  {
    const auto q = bound.size();
    Eigen::MatrixXd G(2 * q, q);
    Eigen::VectorXd h(2 * q);
    G.topRows(q) = Eigen::MatrixXd::Identity(q, q);
    G.bottomRows(q) = -Eigen::MatrixXd::Identity(q, q);
    h.head(q) = bound;
    h.tail(q) = bound;
    return polyhedron(std::move(G), std::move(h));
  }

  /// Throws std::invalid_argument if the set is not valid for dimension q.
  void validate(Eigen::Index q, const std::string & name) const
  {
    switch (kind) {
      case Kind::Unconstrained:
        return;
      case Kind::Polyhedron:
        if (G.cols() != q) {
          throw std::invalid_argument(name + ": polyhedron G has " + std::to_string(G.cols())
                                      + " columns, expected " + std::to_string(q));
        }
        if (h.size() != G.rows()) {
          throw std::invalid_argument(name + ": polyhedron h length does not match G rows");
        }
        if ((h.array() < 0.0).any()) {
          throw std::invalid_argument(name + ": polyhedron must contain 0 (requires h >= 0)");
        }
        return;
      case Kind::Ball:
        if (!(radius > 0.0)) {
          throw std::invalid_argument(name + ": ball radius must be positive");
        }
        return;
    }
  }
};

/**
 * @brief Infinite-horizon LTI problem data.
 *
 * Dynamics xdot = A x + B u from initial state x0, with pointwise
 * constraints x(t) in state_set, u(t) in input_set.
 */
struct LtiProblem
{
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd x0;
  SetDescription state_set;
  SetDescription input_set;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }

  /// Throws std::invalid_argument on inconsistent dimensions or invalid sets.
  void validate() const
  {
    if (A.rows() != A.cols()) { throw std::invalid_argument("problem.A: must be square"); }
    if (B.rows() != A.rows()) {
      throw std::invalid_argument("problem.B: row count must match A (" + std::to_string(A.rows())
                                  + "), got " + std::to_string(B.rows()));
    }
    if (x0.size() != A.rows()) {
      throw std::invalid_argument("problem.x0: length must match A dimension");
    }
    state_set.validate(state_dim(), "problem.state_set");
    input_set.validate(input_dim(), "problem.input_set");
  }
};

}  // namespace galcert
