#pragma once

#include "core/gp.hpp"
#include "core/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lsqp {

/// Default strictly positive floor applied when a description does not
/// specify per-variable lower bounds.
inline constexpr double kDefaultVariableFloor = 1e-6;

/// Evaluates objective and all constraints with gradients at x.
/// Throws DimensionMismatch for a wrong-sized x, std::invalid_argument when
/// x falls below the variable floor, and NonFiniteEvaluation (naming the
/// offending function) when any value or gradient entry is not finite.
[[nodiscard]] Evaluation evaluate_point(const Problem& problem, const Vector& x);

struct PositivityReport {
  bool all_positive{true};
  std::vector<std::string> offenders;  // names of nonpositive entries
};

/// Checks f > 0, g_i > 0, h_j > 0 for an evaluation, as required before a
/// log transform.
[[nodiscard]] PositivityReport check_positivity(const Problem& problem,
                                                const Evaluation& eval);

enum class Relation { LessEqual, Equal };

/// Constraint as modelled: lhs(x) <= rhs or lhs(x) = rhs, where rhs is a
/// constant or a monomial. Normalization to unit right-hand sides happens in
/// construct_standard_form.
struct RawConstraint {
  ScalarFunction lhs;
  Relation relation{Relation::LessEqual};
  double rhs{1.0};
  std::optional<gp::Monomial> rhs_term;
};

struct RawProblemDescription {
  int n_vars{0};
  ScalarFunction objective;
  std::vector<RawConstraint> constraints;
  std::optional<Vector> lower_bounds;
  std::vector<std::string> variable_names;
};

/// Rewrites every constraint as g(x) <= 1 or h(x) = 1:
/// a monomial right-hand side divides through, a positive constant rescales,
/// and a nonpositive constant rhs shifts both sides by 1 - rhs (dividing by
/// it would flip the inequality).
[[nodiscard]] Problem construct_standard_form(const RawProblemDescription& desc);

}  // namespace lsqp
