#pragma once

/**
 * @file riccati.hpp
 * @brief Continuous algebraic Riccati equation A^T P + P A - P B B^T P + I = 0.
 *
 * Ground-truth reference for the unconstrained problem: the optimal cost is
 * 1/2 x0^T P x0 with P the stabilizing solution.
 */

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "galcert/galerkin.hpp"

namespace galcert {

/// Stabilizing CARE solution with the closed-loop spectrum.
struct RiccatiSolution
{
  Eigen::MatrixXd P;                  ///< symmetric positive definite
  Eigen::VectorXcd closed_loop_eigs;  ///< eig(A - B B^T P), strictly stable

  double cost(const Eigen::VectorXd & x0) const { return 0.5 * x0.dot(P * x0); }
};

namespace detail {

/// Solve A_cl^T P + P A_cl = -Q for symmetric P by Kronecker vectorization.
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd & a_cl, const Eigen::MatrixXd & q)
{
  const Eigen::Index n = a_cl.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd op = kron(eye, a_cl.transpose()) + kron(a_cl.transpose(), eye);
  const Eigen::VectorXd vec_q = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd vec_p = op.partialPivLu().solve(vec_q);
  Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n);
  return 0.5 * (p + p.transpose());
}

/// PBH scan: an eigenvalue of A with Re >= 0 where [lambda I - A, B] loses rank.
inline std::string find_uncontrollable_unstable_mode(
  const Eigen::MatrixXd & A, const Eigen::MatrixXd & B)
{
  const Eigen::Index n = A.rows();
  const Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (lam.real() < 0.0) { continue; }
    Eigen::MatrixXcd pencil(n, n + B.cols());
    pencil.leftCols(n) = lam * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
    pencil.rightCols(B.cols()) = B.cast<std::complex<double>>();
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    if (svd.singularValues()(n - 1) < 1e-9 * svd.singularValues()(0)) {
      return "uncontrollable unstable eigenvalue " + std::to_string(lam.real())
           + (lam.imag() != 0.0 ? " + " + std::to_string(lam.imag()) + "i" : "");
    }
  }
  return "stable invariant subspace is degenerate";
}

}  // namespace detail

/**
 * @brief Stabilizing CARE solution via the Hamiltonian's stable invariant subspace.
 *
 * The 2n x 2n Hamiltonian [[A, -BB^T], [-I, -A^T]] has spectrum symmetric
 * about the imaginary axis; the eigenvectors of its n stable eigenvalues
 * stacked as [X1; X2] give P = Re(X2 X1^{-1}). A couple of Kleinman-Newton
 * sweeps (Lyapunov solves on the closed loop) polish P to full precision.
 * Throws std::invalid_argument for non-stabilizable (A, B), naming the
 * offending eigenvalue.
 */
inline RiccatiSolution solve_care(const Eigen::MatrixXd & A, const Eigen::MatrixXd & B)
{
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw std::invalid_argument("solve_care: dimension mismatch");
  }
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd bbt = B * B.transpose();

  Eigen::MatrixXd ham(2 * n, 2 * n);
  ham.topLeftCorner(n, n) = A;
  ham.topRightCorner(n, n) = -bbt;
  ham.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  ham.bottomRightCorner(n, n) = -A.transpose();

  const Eigen::EigenSolver<Eigen::MatrixXd> es(ham);
  if (es.info() != Eigen::Success) { throw std::runtime_error("solve_care: eigensolve failed"); }

  Eigen::MatrixXcd stable(2 * n, n);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < 2 * n && found < n; ++i) {
    if (es.eigenvalues()(i).real() < 0.0) { stable.col(found++) = es.eigenvectors().col(i); }
  }
  if (found < n) {
    throw std::invalid_argument(
      "solve_care: (A, B) not stabilizable: " + detail::find_uncontrollable_unstable_mode(A, B));
  }

  const Eigen::MatrixXcd x1 = stable.topRows(n);
  const Eigen::MatrixXcd x2 = stable.bottomRows(n);
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(x1);
  if (!lu.isInvertible()) {
    throw std::invalid_argument(
      "solve_care: (A, B) not stabilizable: " + detail::find_uncontrollable_unstable_mode(A, B));
  }
  Eigen::MatrixXd P = (x2 * lu.inverse()).real();
  P = 0.5 * (P + P.transpose());

  // Kleinman-Newton polish: quadratic convergence from the subspace estimate
  for (int sweep = 0; sweep < 3; ++sweep) {
    const Eigen::MatrixXd a_cl = A - bbt * P;
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) + P * bbt * P;
    P = detail::solve_lyapunov(a_cl, q);
  }

  RiccatiSolution sol;
  sol.P = P;
  sol.closed_loop_eigs = Eigen::EigenSolver<Eigen::MatrixXd>(A - bbt * P).eigenvalues();

  const double residual =
    (A.transpose() * P + P * A - P * bbt * P + Eigen::MatrixXd::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
  const double scale = 1.0 + P.cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale) {
    throw std::runtime_error("solve_care: residual " + std::to_string(residual));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sol.closed_loop_eigs(i).real() >= 0.0) {
      throw std::runtime_error("solve_care: closed loop not stable");
    }
  }
  return sol;
}

/// Default truncation horizon: 30 / (slowest closed-loop decay rate).
inline double default_oracle_horizon(const RiccatiSolution & care)
{
  double slowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < care.closed_loop_eigs.size(); ++i) {
    slowest = std::min(slowest, -care.closed_loop_eigs(i).real());
  }
  return 30.0 / slowest;
}

}  // namespace galcert
