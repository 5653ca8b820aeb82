#pragma once

#include "core/qp.hpp"
#include "core/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lsqp {

enum class Algorithm { Sqp, Lsqp };

enum class Termination {
  GradLagrangian,     // Lagrangian gradient below tolerance
  SmallStep,          // accepted step shorter than tolerance
  MaxIter,            // iteration budget exhausted
  LineSearchFailure,  // no acceptable step along the QP direction
  TransformFailure,   // log transform undefined at a required point
};

[[nodiscard]] std::string termination_name(Termination t);
[[nodiscard]] std::string algorithm_name(Algorithm a);

struct SolverOptions {
  int max_iterations{500};
  double eps_grad_lagrangian{1e-6};  // infinity norm of the Lagrangian gradient
  double eps_step{1e-8};             // Euclidean norm of the accepted step
  double merit_penalty_init{1.0};
  // Per-iteration step caps relative to the current point, applied to the
  // first trust_fractions.size() iterations as hard linear rows.
  std::vector<double> trust_fractions{};
  // When true, a trial point with a nonpositive logged value is treated as
  // infinitely bad merit and the line search backtracks; when false such a
  // point aborts the solve with TransformFailure. Only meaningful for Lsqp.
  bool enforce_positivity_in_linesearch{false};
};

struct IterationRecord {
  Vector x;  // user-space point
  double f{0.0};
  double merit{0.0};
  double step_norm{0.0};  // zero for the initial record
  double constraint_violation{0.0};
  double penalty{0.0};
};

struct SolveResult {
  Vector x_final;
  double f_final{0.0};
  int iterations{0};  // accepted steps
  Termination termination{Termination::MaxIter};
  std::vector<IterationRecord> trace;  // initial point plus one per accepted step
  // Multiplier estimate laid out as [inequalities, equalities, lower bounds],
  // expressed in the space the algorithm iterates in (log space for Lsqp).
  Vector multipliers;
  double grad_lagrangian_norm{0.0};  // infinity norm, same space as multipliers
  double max_violation{0.0};         // worst violation of g <= 1 / h = 1 at x_final
  std::string detail;
};

/// Quadratic model of the problem around an evaluation, in the original
/// variables: linearized rows J d + (g - 1) <= 0 and J d + (h - 1) = 0.
[[nodiscard]] QpData build_subproblem(const Evaluation& eval, const Matrix& B);

struct LineSearchResult {
  bool accepted{false};
  double alpha{0.0};
  double merit{0.0};  // merit at the accepted point
};

/// Backtracking Armijo search: tries alpha = 1 and halves up to 25 times
/// until merit(v + alpha d) <= merit0 + 1e-4 alpha D, where D is the
/// directional derivative clamped to be nonpositive. A non-finite trial merit
/// rejects that trial; exceptions from merit_fn propagate.
[[nodiscard]] LineSearchResult armijo_line_search(
    const std::function<double(const Vector&)>& merit_fn, const Vector& v,
    double merit0, const Vector& d, double directional_derivative);

enum class BfgsOutcome { Updated, Skipped };

/// Powell-damped BFGS update of B with step s and gradient change y.
/// Damping pulls y toward Bs just enough to keep the update positive
/// definite; degenerate or non-finite data leaves B untouched.
BfgsOutcome damped_bfgs_update(Matrix& B, const Vector& s, const Vector& y);

[[nodiscard]] SolveResult solve(const Problem& problem, Algorithm algorithm,
                                const Vector& x0, const SolverOptions& options);

[[nodiscard]] SolveResult solve_sqp(const Problem& problem, const Vector& x0,
                                    const SolverOptions& options);
[[nodiscard]] SolveResult solve_lsqp(const Problem& problem, const Vector& x0,
                                     const SolverOptions& options);

}  // namespace lsqp
