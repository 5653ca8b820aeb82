#pragma once

#include "core/engine.hpp"
#include "core/gp.hpp"
#include "core/problem.hpp"
#include "core/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace lsqp::bench {

struct SuccessTolerances {
  double objective_rel{1e-3};
  double variable_rel{5e-2};
};

struct BenchmarkCase {
  std::string name;
  Problem problem;
  KnownOptimum optimum;
  SolverOptions default_options;  // shared by both algorithms
  SuccessTolerances tolerances;
};

enum class Outcome {
  Success,
  LocalOptimum,
  MaxIter,
  LineSearchFailure,
  TransformFailure,
};

[[nodiscard]] std::string outcome_name(Outcome o);

/// Success requires a converged termination plus objective and per-variable
/// agreement with the known optimum within the case tolerances. A converged
/// run that lands anywhere else counts as LocalOptimum; non-converged
/// terminations map to their own outcome.
[[nodiscard]] Outcome classify(const BenchmarkCase& c, const SolveResult& r);

/// Box-design toy problem: maximize box volume under wall and floor area
/// budgets and aspect-ratio limits. Fully GP-compatible; the optimum is
/// analytic.
[[nodiscard]] BenchmarkCase boyd_problem();

/// Constrained Rosenbrock valley, shifted by +1 so the objective stays
/// positive, with a cubic and a linear cut through the valley. Has a genuine
/// local optimum near the origin. Trust fractions (0.2, 0.5, 1.0) cap the
/// first three steps.
[[nodiscard]] BenchmarkCase rosenbrock_problem();

/// Heat-exchanger design with eight variables and six inequality
/// constraints, one of them posynomial and the rest signomial.
[[nodiscard]] BenchmarkCase floudas_problem();

/// Low-fidelity aircraft sizing: minimize fuel weight over 18 variables with
/// 16 inequality constraints and one equality. Built from a named constant
/// table; the overload without arguments uses the default table.
[[nodiscard]] BenchmarkCase kirschen_ozturk_problem();
[[nodiscard]] BenchmarkCase kirschen_ozturk_problem(
    const std::map<std::string, double>& constants);

[[nodiscard]] const std::map<std::string, double>&
kirschen_ozturk_default_constants();

[[nodiscard]] std::vector<std::string> benchmark_names();

/// Looks up a benchmark by name ("boyd", "rosenbrock", "floudas",
/// "kirschen_ozturk"). config_json may be empty or a JSON object; a
/// "constants" member (kirschen_ozturk only) replaces the entire constant
/// table and must list every constant, otherwise MissingConstants is thrown.
/// Unknown names throw UnknownProblem.
[[nodiscard]] BenchmarkCase make_benchmark(const std::string& name,
                                           const std::string& config_json = "");

}  // namespace lsqp::bench
