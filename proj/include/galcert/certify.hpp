#pragma once

/**
 * @file certify.hpp
 * @brief Sweep over basis sizes and verify every provable relation between
 * the two bounds: upper monotone decrease, lower monotone increase, sandwich
 * around the oracle value, the Cauchy bound between consecutive upper
 * optimizers, pointwise dynamics exactness, adjoint exactness of the lower
 * dual, strong duality, and gap convergence.
 */

#include <atomic>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "galcert/collocation.hpp"
#include "galcert/galerkin.hpp"
#include "galcert/riccati.hpp"
#include "galcert/sets.hpp"
#include "galcert/solver.hpp"

namespace galcert {

/// Knobs of a certification sweep.
struct SweepConfig
{
  SetMode upper_mode = SetMode::Sampled;
  int weight_count = 4;       ///< lower-problem moment weights
  double tol = 1e-8;          ///< solver tolerance; monotonicity slack is 10x this
  int max_iter = 50000;
  int grid_points = 64;       ///< upper sampling grid size
  int residual_grid = 1000;   ///< dynamics/adjoint check grid size
  double oracle_horizon = 0.0;  ///< 0: 30 / slowest closed-loop decay
  int oracle_intervals = 800;
  int threads = 0;            ///< 0: GALERKIN_THREADS env or hardware count
};

/// One basis size of the sweep.
struct SweepRecord
{
  int s = 0;
  double upper_cost = std::numeric_limits<double>::infinity();   ///< J_s
  double lower_cost = std::numeric_limits<double>::infinity();   ///< J~_s
  SolveStatus upper_status = SolveStatus::MaxIter;
  SolveStatus lower_status = SolveStatus::MaxIter;
  double gap = std::numeric_limits<double>::quiet_NaN();
  double dynamics_residual = std::numeric_limits<double>::quiet_NaN();
  double adjoint_residual = std::numeric_limits<double>::quiet_NaN();
  double upper_duality_gap = std::numeric_limits<double>::quiet_NaN();
  double lower_duality_gap = std::numeric_limits<double>::quiet_NaN();
  double intersample_violation = std::numeric_limits<double>::quiet_NaN();
  double cauchy_lhs = std::numeric_limits<double>::quiet_NaN();  ///< vs previous record
  double cauchy_rhs = std::numeric_limits<double>::quiet_NaN();
  bool cauchy_ok = true;
  double upper_solution_norm = std::numeric_limits<double>::quiet_NaN();  ///< |eta|_2
  double lower_dual_norm = std::numeric_limits<double>::quiet_NaN();      ///< |eta_p|_2
  std::string error;

  bool upper_ok() const { return upper_status == SolveStatus::Optimal; }
  bool lower_ok() const { return lower_status == SolveStatus::Optimal; }
};

/// Reference value the sandwich is checked against.
struct OracleBlock
{
  double value = std::numeric_limits<double>::quiet_NaN();
  double band = 0.0;  ///< half-width: 0 for CARE, convergence estimate for collocation
  std::string source;  ///< "care" or "collocation"
};

/// Full result of a sweep with the verified flags.
struct BoundReport
{
  std::vector<SweepRecord> records;
  OracleBlock oracle;
  int first_finite_s = -1;  ///< N0: first s with a finite upper value
  double tol = 1e-8;
  SetMode upper_mode = SetMode::Sampled;

  bool upper_monotone = true;
  bool upper_monotone_checked = true;  ///< false in SampledWithTail mode (nesting not guaranteed)
  bool lower_monotone = true;
  bool sandwich_ok = true;
  bool cauchy_ok = true;
  bool duality_ok = true;
  bool exactness_ok = true;  ///< dynamics + adjoint residual bounds

  bool all_ok() const
  {
    return (upper_monotone || !upper_monotone_checked) && lower_monotone && sandwich_ok
        && cauchy_ok && duality_ok && exactness_ok;
  }
};

/// Cauchy-bound check between the upper optimizers at s and s+1.
struct CauchyCheck
{
  double lhs = 0.0;  ///< |i_s(eta_s) - eta_{s+1}|^2, the trajectory L2 distance squared
  double rhs = 0.0;  ///< 4 (J_s - J_{s+1})
  bool ok = true;
};

/**
 * @brief Verify |i_s(eta_s) - eta_{s+1}|^2 <= 4 (J_s - J_{s+1}) + 40 tol.
 *
 * The left side equals the squared trajectory distance
 * ||x_s - x_{s+1}||^2 + ||u_s - u_{s+1}||^2 by orthonormality, computed
 * exactly in coefficient space. Valid for upper solutions under sampled sets
 * (the nesting assumption).
 */
inline CauchyCheck check_cauchy(
  const Solution & sol_s,
  const Solution & sol_s1,
  Eigen::Index n,
  Eigen::Index m,
  int s,
  double tol = 1e-8)
{
  const ParamVector eta_x{sol_s.z.head(n * s), s};
  const ParamVector eta_u{sol_s.z.tail(m * s), s};
  const ParamVector eta_x1{sol_s1.z.head(n * (s + 1)), s + 1};
  const ParamVector eta_u1{sol_s1.z.tail(m * (s + 1)), s + 1};

  CauchyCheck check;
  check.lhs = (include_coeffs(eta_x, s + 1).coeffs - eta_x1.coeffs).squaredNorm()
            + (include_coeffs(eta_u, s + 1).coeffs - eta_u1.coeffs).squaredNorm();
  check.rhs = 4.0 * (sol_s.objective - sol_s1.objective);
  check.ok = check.lhs <= check.rhs + 40.0 * tol;
  return check;
}

/**
 * @brief Pointwise adjoint residual max_t |pdot(t) + A^T p(t) + v(t)|.
 *
 * p is reconstructed from the equality multipliers, v from the stationarity
 * condition (v = eta_x plus the inequality normal contributions). For
 * optimal lower solutions this is at solver-tolerance level; the upper
 * problem's multipliers do not satisfy this adjoint form.
 */
inline double adjoint_residual(
  const ParamVector & eta_p,
  const ParamVector & eta_v,
  const LtiProblem & prob,
  const BasisSpec & spec,
  const Eigen::VectorXd & t_grid)
{
  double worst = 0.0;
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid(k);
    const Eigen::VectorXd p = trajectory_eval(eta_p, spec, t);
    const Eigen::VectorXd pdot = trajectory_derivative_eval(eta_p, spec, t);
    const Eigen::VectorXd v = trajectory_eval(eta_v, spec, t);
    worst = std::max(worst, (pdot + prob.A.transpose() * p + v).norm());
  }
  return worst;
}

/**
 * @brief Adjoint exactness of a solved lower problem.
 *
 * Builds eta_p from the solution's equality multipliers and eta_v from the
 * x-block of the stationarity condition, then evaluates the pointwise
 * residual over the grid.
 */
inline double check_adjoint_exactness(
  const Solution & lower_sol,
  const ConicProgram & lower_prog,
  const LtiProblem & prob,
  const BasisSpec & spec,
  const Eigen::VectorXd & t_grid)
{
  const Eigen::Index n = prob.state_dim();
  const int s = spec.s;

  Eigen::VectorXd eta_v = lower_sol.z.head(n * s);
  for (Eigen::Index i = 0; i < lower_sol.dual_ineq.size(); ++i) {
    const double mu = lower_sol.dual_ineq(i);
    eta_v += mu * lower_prog.inequalities.linear[static_cast<std::size_t>(i)].a.head(n * s);
  }
  for (std::size_t j = 0; j < lower_sol.dual_soc.size(); ++j) {
    eta_v += lower_prog.inequalities.soc[j].W.leftCols(n * s).transpose() * lower_sol.dual_soc[j];
  }

  return adjoint_residual(
    ParamVector{lower_sol.dual_eq, s}, ParamVector{eta_v, s}, prob, spec, t_grid);
}

/// Gap shrinkage over the sweep window.
struct ConvergenceSummary
{
  double gap_first = 0.0;
  double gap_last = 0.0;
  double ratio = 0.0;  ///< gap_last / gap_first; 0 when the gap starts at 0
};

/**
 * @brief Gap at the first and last basis sizes where both bounds are optimal.
 *
 * No rate is asserted; convergence of the two limits to each other is a
 * property of the set sequences (reported as observed or not). Throws when
 * fewer than two records have both solves optimal.
 */
inline ConvergenceSummary convergence_summary(const BoundReport & report)
{
  const SweepRecord * first = nullptr;
  const SweepRecord * last = nullptr;
  for (const auto & rec : report.records) {
    if (rec.upper_ok() && rec.lower_ok()) {
      if (first == nullptr) { first = &rec; }
      last = &rec;
    }
  }
  if (first == nullptr || first == last) {
    throw std::invalid_argument("convergence_summary: need at least two finite records");
  }
  ConvergenceSummary summary;
  summary.gap_first = first->gap;
  summary.gap_last = last->gap;
  summary.ratio = summary.gap_first <= 10.0 * report.tol
                    ? 0.0
                    : summary.gap_last / summary.gap_first;
  return summary;
}

namespace detail {

inline int sweep_thread_count(int requested, int jobs)
{
  int threads = requested;
  if (threads <= 0) {
    if (const char * env = std::getenv("GALERKIN_THREADS")) { threads = std::atoi(env); }
  }
  if (threads <= 0) { threads = static_cast<int>(std::thread::hardware_concurrency()); }
  if (threads < 1) { threads = 1; }
  return std::min(threads, jobs);
}

/// Assemble one side's program: equality system plus embedded constraint sets.
inline ConicProgram build_program(
  const EqualitySystem & system,
  const CoefficientSet & state_set,
  const CoefficientSet & input_set,
  Eigen::Index n,
  Eigen::Index m,
  int s)
{
  ConicProgram prog;
  prog.equality = system;
  prog.dim = (n + m) * s;
  prog.inequalities = state_set.embedded(prog.dim, 0);
  prog.inequalities.merge(input_set.embedded(prog.dim, n * s));
  prog.inequalities.mode = state_set.mode;
  return prog;
}

inline Solution solve_program(const ConicProgram & prog, const SweepConfig & config)
{
  if (prog.inequalities.empty()) { return solve_equality_qp(prog); }
  return solve_conic_qp(prog, config.tol, config.max_iter);
}

}  // namespace detail

/**
 * @brief Solve both problems for every s in [s_min, s_max] and evaluate all flags.
 *
 * Per-s solves are independent and run on a small thread pool capped by
 * GALERKIN_THREADS. Infeasible leading sizes are tolerated: N0 is the first
 * size with a finite upper value and monotonicity is enforced from there on.
 * Solver errors are recorded per record without aborting the sweep.
 */
inline BoundReport run_sweep(
  const LtiProblem & prob, double p, int s_min, int s_max, const SweepConfig & config = {})
{
  if (s_min < 1 || s_max < s_min) { throw std::invalid_argument("run_sweep: bad s range"); }
  prob.validate();

  const Eigen::Index n = prob.state_dim();
  const Eigen::Index m = prob.input_dim();
  const bool constrained = prob.state_set.kind != SetDescription::Kind::Unconstrained
                        || prob.input_set.kind != SetDescription::Kind::Unconstrained;

  BoundReport report;
  report.tol = config.tol;
  report.upper_mode = config.upper_mode;
  report.upper_monotone_checked = config.upper_mode == SetMode::Sampled;

  // oracle reference
  const RiccatiSolution care = solve_care(prob.A, prob.B);
  if (constrained) {
    const double T =
      config.oracle_horizon > 0.0 ? config.oracle_horizon : default_oracle_horizon(care);
    const CollocationResult colo = collocation_cost(prob, T, config.oracle_intervals, config.tol);
    report.oracle.value = colo.cost;
    report.oracle.band = colo.convergence_estimate;
    report.oracle.source = "collocation";
  } else {
    report.oracle.value = care.cost(prob.x0);
    report.oracle.band = 0.0;
    report.oracle.source = "care";
  }

  const std::vector<Eigen::VectorXd> weights = default_lower_weights(p, config.weight_count);

  const int count = s_max - s_min + 1;
  report.records.resize(count);
  std::vector<Solution> upper_solutions(count), lower_solutions(count);

  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (int idx = next.fetch_add(1); idx < count; idx = next.fetch_add(1)) {
      SweepRecord & rec = report.records[idx];
      rec.s = s_min + idx;
      try {
        const BasisSpec spec = make_basis(p, rec.s);
        const Eigen::VectorXd grid = default_constraint_grid(spec, config.grid_points);
        const Eigen::VectorXd residual_grid =
          Eigen::VectorXd::LinSpaced(config.residual_grid, 0.0, 20.0 / p);

        const ConicProgram upper = detail::build_program(
          assemble_upper(prob, spec),
          build_upper_set(prob.state_set, spec, grid, n, config.upper_mode),
          build_upper_set(prob.input_set, spec, grid, m, config.upper_mode), n, m, rec.s);
        const ConicProgram lower = detail::build_program(
          assemble_lower(prob, spec), build_lower_set(prob.state_set, spec, weights, n),
          build_lower_set(prob.input_set, spec, weights, m), n, m, rec.s);

        Solution up = detail::solve_program(upper, config);
        Solution low = detail::solve_program(lower, config);

        rec.upper_status = up.status;
        rec.lower_status = low.status;
        rec.upper_cost = up.status == SolveStatus::Optimal
                           ? up.objective
                           : std::numeric_limits<double>::infinity();
        rec.lower_cost = low.status == SolveStatus::Optimal
                           ? low.objective
                           : std::numeric_limits<double>::infinity();

        if (up.status == SolveStatus::Optimal) {
          const ParamVector eta_x{up.z.head(n * rec.s), rec.s};
          const ParamVector eta_u{up.z.tail(m * rec.s), rec.s};
          rec.dynamics_residual = dynamics_residual(eta_x, eta_u, prob, spec, residual_grid);
          rec.upper_duality_gap = duality_gap(upper, up);
          rec.upper_solution_norm = up.z.norm();
          rec.intersample_violation = std::max(
            max_pointwise_violation(eta_x, prob.state_set, spec, residual_grid),
            max_pointwise_violation(eta_u, prob.input_set, spec, residual_grid));
        }
        if (low.status == SolveStatus::Optimal) {
          rec.lower_duality_gap = duality_gap(lower, low);
          rec.adjoint_residual = check_adjoint_exactness(low, lower, prob, spec, residual_grid);
          rec.lower_dual_norm = low.dual_eq.norm();
        }
        if (up.status == SolveStatus::Optimal && low.status == SolveStatus::Optimal) {
          rec.gap = rec.upper_cost - rec.lower_cost;
        }

        upper_solutions[idx] = std::move(up);
        lower_solutions[idx] = std::move(low);
      } catch (const std::exception & err) {
        rec.error = err.what();
      }
    }
  };

  const int threads = detail::sweep_thread_count(config.threads, count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) { pool.emplace_back(worker); }
    for (auto & th : pool) { th.join(); }
  }

  // flags
  const double slack = 10.0 * config.tol;
  for (int idx = 0; idx < count; ++idx) {
    SweepRecord & rec = report.records[idx];
    if (rec.upper_ok() && report.first_finite_s < 0) { report.first_finite_s = rec.s; }

    if (rec.upper_ok()) {
      const double scale =
        1e-6 * (1.0 + upper_solutions[idx].z.norm());
      if (rec.dynamics_residual > scale) { report.exactness_ok = false; }
      const bool upper_duality_fine =
        rec.upper_duality_gap <= 1e-6 * (1.0 + std::abs(rec.upper_cost));
      if (!upper_duality_fine) { report.duality_ok = false; }
      if (rec.upper_cost < report.oracle.value - report.oracle.band - slack) {
        report.sandwich_ok = false;
      }
    }
    if (rec.lower_ok()) {
      if (rec.adjoint_residual
          > 1e-6 * (1.0 + lower_solutions[idx].dual_eq.norm())) {
        report.exactness_ok = false;
      }
      if (rec.lower_duality_gap > 1e-6 * (1.0 + std::abs(rec.lower_cost))) {
        report.duality_ok = false;
      }
      if (rec.lower_cost > report.oracle.value + report.oracle.band + slack) {
        report.sandwich_ok = false;
      }
    }
    if (idx > 0) {
      const SweepRecord & prev = report.records[idx - 1];
      if (prev.upper_ok() && rec.upper_ok()) {
        if (rec.upper_cost > prev.upper_cost + slack) { report.upper_monotone = false; }
        const CauchyCheck cauchy = check_cauchy(
          upper_solutions[idx - 1], upper_solutions[idx], n, m, prev.s, config.tol);
        rec.cauchy_lhs = cauchy.lhs;
        rec.cauchy_rhs = cauchy.rhs;
        rec.cauchy_ok = cauchy.ok;
        if (report.upper_monotone_checked && !cauchy.ok) { report.cauchy_ok = false; }
      }
      if (prev.lower_ok() && rec.lower_ok()
          && rec.lower_cost < prev.lower_cost - slack) {
        report.lower_monotone = false;
      }
    }
  }
  return report;
}

}  // namespace galcert
