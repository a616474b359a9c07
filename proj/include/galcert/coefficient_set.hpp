#pragma once

/**
 * @file coefficient_set.hpp
 * @brief Convex constraint sets on stacked basis coefficients.
 */

#include <vector>

#include <Eigen/Dense>

namespace galcert {

/// Halfspace a^T eta <= b.
struct LinearInequality
{
  Eigen::VectorXd a;
  double b = 0.0;
};

/**
 * @brief Second-order-cone row |W eta|_2 <= bound.
 *
 * Coordinate-selection cones (scale * |eta_sel| <= bound) are the special
 * case where W has one scaled unit row per selected coordinate; grid rows of
 * ball sets need the general linear image.
 */
struct SocConstraint
{
  Eigen::MatrixXd W;
  double bound = 0.0;
};

/// How a CoefficientSet was constructed; determines which guarantees apply.
enum class SetMode {
  Sampled,          ///< upper sets: grid sampling, nesting exact, tail unchecked
  SampledWithTail,  ///< upper sets: sampling plus tail cone, nesting not guaranteed
  Moment            ///< lower sets: integrated against certified nonnegative weights
};

/**
 * @brief Intersection of halfspaces and second-order cones on coefficient
 * vectors; closed and convex by construction.
 */
struct CoefficientSet
{
  std::vector<LinearInequality> linear;
  std::vector<SocConstraint> soc;
  SetMode mode = SetMode::Sampled;
  bool degenerate = false;  ///< some polyhedron row had h = 0 (empty interior at 0)

  bool empty() const { return linear.empty() && soc.empty(); }

  Eigen::Index linear_rows() const { return static_cast<Eigen::Index>(linear.size()); }

  /// Re-index all constraints into a larger stacked vector starting at `offset`.
  CoefficientSet embedded(Eigen::Index total_dim, Eigen::Index offset) const
  {
    CoefficientSet out;
    out.mode = mode;
    out.degenerate = degenerate;
    out.linear.reserve(linear.size());
    for (const auto & row : linear) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(total_dim);
      a.segment(offset, row.a.size()) = row.a;
      out.linear.push_back({std::move(a), row.b});
    }
    out.soc.reserve(soc.size());
    for (const auto & cone : soc) {
      Eigen::MatrixXd W = Eigen::MatrixXd::Zero(cone.W.rows(), total_dim);
      W.middleCols(offset, cone.W.cols()) = cone.W;
      out.soc.push_back({std::move(W), cone.bound});
    }
    return out;
  }

  /// Append all constraints of another set (already in the same coordinates).
  void merge(const CoefficientSet & other)
  {
    linear.insert(linear.end(), other.linear.begin(), other.linear.end());
    soc.insert(soc.end(), other.soc.begin(), other.soc.end());
    degenerate = degenerate || other.degenerate;
  }

  /// Max violation of all constraints at eta (0 when feasible).
  double violation(const Eigen::VectorXd & eta) const
  {
    double worst = 0.0;
    for (const auto & row : linear) { worst = std::max(worst, row.a.dot(eta) - row.b); }
    for (const auto & cone : soc) { worst = std::max(worst, (cone.W * eta).norm() - cone.bound); }
    return worst;
  }
};

}  // namespace galcert
