#include "lsqp/lsqp.h"

#include "core/benchmarks.hpp"
#include "core/engine.hpp"
#include "core/gp.hpp"
#include "core/harness.hpp"
#include "core/problem.hpp"
#include "core/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

struct lsqp_problem {
  lsqp::Problem problem;
  // Per-problem solver defaults, set for benchmark instances.
  std::optional<lsqp::SolverOptions> defaults;
};

struct lsqp_result {
  lsqp::SolveResult result;
  std::string termination;
};

namespace {

static_assert(static_cast<int>(lsqp::StructureClass::Monomial) ==
              LSQP_STRUCTURE_MONOMIAL);
static_assert(static_cast<int>(lsqp::StructureClass::Posynomial) ==
              LSQP_STRUCTURE_POSYNOMIAL);
static_assert(static_cast<int>(lsqp::StructureClass::Signomial) ==
              LSQP_STRUCTURE_SIGNOMIAL);
static_assert(static_cast<int>(lsqp::StructureClass::Opaque) ==
              LSQP_STRUCTURE_OPAQUE);
static_assert(static_cast<int>(lsqp::Termination::GradLagrangian) ==
              LSQP_TERM_GRAD_LAGRANGIAN);
static_assert(static_cast<int>(lsqp::Termination::SmallStep) ==
              LSQP_TERM_SMALL_STEP);
static_assert(static_cast<int>(lsqp::Termination::MaxIter) ==
              LSQP_TERM_MAX_ITER);
static_assert(static_cast<int>(lsqp::Termination::LineSearchFailure) ==
              LSQP_TERM_LINE_SEARCH_FAILURE);
static_assert(static_cast<int>(lsqp::Termination::TransformFailure) ==
              LSQP_TERM_TRANSFORM_FAILURE);

thread_local std::string t_last_error;

template <typename Fn>
lsqp_status guarded(Fn&& fn) {
  t_last_error.clear();
  try {
    return fn();
  } catch (const lsqp::UnknownProblem& e) {
    t_last_error = e.what();
    return LSQP_ERR_UNKNOWN_PROBLEM;
  } catch (const lsqp::MissingConstants& e) {
    t_last_error = e.what();
    return LSQP_ERR_MISSING_CONSTANTS;
  } catch (const lsqp::DimensionMismatch& e) {
    t_last_error = e.what();
    return LSQP_ERR_DIMENSION;
  } catch (const lsqp::NonFiniteEvaluation& e) {
    t_last_error = e.what();
    return LSQP_ERR_NONFINITE;
  } catch (const lsqp::TransformFailure& e) {
    t_last_error = e.what();
    return LSQP_ERR_TRANSFORM;
  } catch (const lsqp::NumericalBreakdown& e) {
    t_last_error = e.what();
    return LSQP_ERR_NUMERICAL;
  } catch (const std::invalid_argument& e) {
    t_last_error = e.what();
    return LSQP_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return LSQP_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return LSQP_ERR_INTERNAL;
  }
}

[[nodiscard]] char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

[[nodiscard]] lsqp::ScalarFunction wrap_callback(lsqp_eval_fn fn, void* user,
                                                 lsqp_structure structure,
                                                 const char* name) {
  if (fn == nullptr) throw std::invalid_argument("evaluation callback is null");
  if (structure < LSQP_STRUCTURE_MONOMIAL ||
      structure > LSQP_STRUCTURE_OPAQUE) {
    throw std::invalid_argument("bad structure tag");
  }
  lsqp::ScalarFunction f;
  f.structure = static_cast<lsqp::StructureClass>(structure);
  f.name = name != nullptr ? name : "";
  f.eval = [fn, user](const lsqp::Vector& x, double& value,
                      lsqp::Vector* grad) {
    double* grad_ptr = nullptr;
    if (grad != nullptr) {
      grad->resize(x.size());
      grad_ptr = grad->data();
    }
    const int rc =
        fn(x.data(), static_cast<int>(x.size()), &value, grad_ptr, user);
    if (rc != 0) {
      throw lsqp::NonFiniteEvaluation("evaluation callback returned " +
                                      std::to_string(rc));
    }
  };
  return f;
}

[[nodiscard]] lsqp::SolverOptions resolve_options(
    const std::optional<lsqp::SolverOptions>& defaults,
    const lsqp_options* options) {
  lsqp::SolverOptions out = defaults.value_or(lsqp::SolverOptions{});
  if (options != nullptr) {
    if (options->max_iterations > 0) {
      out.max_iterations = options->max_iterations;
    }
    if (options->eps_grad_lagrangian > 0.0) {
      out.eps_grad_lagrangian = options->eps_grad_lagrangian;
    }
    if (options->eps_step > 0.0) out.eps_step = options->eps_step;
    if (options->enforce_positivity >= 0) {
      out.enforce_positivity_in_linesearch = options->enforce_positivity != 0;
    }
  }
  return out;
}

[[nodiscard]] lsqp::Algorithm to_algorithm(lsqp_algorithm a) {
  if (a == LSQP_ALGO_SQP) return lsqp::Algorithm::Sqp;
  if (a == LSQP_ALGO_LSQP) return lsqp::Algorithm::Lsqp;
  throw std::invalid_argument("bad algorithm value");
}

[[nodiscard]] lsqp_result* make_result(lsqp::SolveResult r) {
  auto* out = new lsqp_result;
  out->termination = lsqp::termination_name(r.termination);
  out->result = std::move(r);
  return out;
}

}  // namespace

extern "C" {

const char* lsqp_version(void) { return "1.0.0"; }

const char* lsqp_last_error(void) { return t_last_error.c_str(); }

void lsqp_string_free(char* s) { delete[] s; }

lsqp_status lsqp_problem_create(int n_vars, lsqp_problem** out) {
  return guarded([&]() {
    if (out == nullptr) throw std::invalid_argument("out is null");
    if (n_vars < 1) throw std::invalid_argument("n_vars must be positive");
    auto* p = new lsqp_problem;
    p->problem.n_vars = n_vars;
    p->problem.lower_bounds =
        lsqp::Vector::Constant(n_vars, lsqp::kDefaultVariableFloor);
    for (int i = 0; i < n_vars; ++i) {
      p->problem.variable_names.push_back("x" + std::to_string(i + 1));
    }
    *out = p;
    return LSQP_OK;
  });
}

void lsqp_problem_destroy(lsqp_problem* problem) { delete problem; }

lsqp_status lsqp_problem_set_objective(lsqp_problem* problem, lsqp_eval_fn fn,
                                       void* user, lsqp_structure structure,
                                       const char* name) {
  return guarded([&]() {
    if (problem == nullptr) throw std::invalid_argument("problem is null");
    problem->problem.objective = wrap_callback(fn, user, structure, name);
    return LSQP_OK;
  });
}

lsqp_status lsqp_problem_add_inequality(lsqp_problem* problem, lsqp_eval_fn fn,
                                        void* user, lsqp_structure structure,
                                        const char* name) {
  return guarded([&]() {
    if (problem == nullptr) throw std::invalid_argument("problem is null");
    problem->problem.ineq_constraints.push_back(
        wrap_callback(fn, user, structure, name));
    return LSQP_OK;
  });
}

lsqp_status lsqp_problem_add_equality(lsqp_problem* problem, lsqp_eval_fn fn,
                                      void* user, lsqp_structure structure,
                                      const char* name) {
  return guarded([&]() {
    if (problem == nullptr) throw std::invalid_argument("problem is null");
    problem->problem.eq_constraints.push_back(
        wrap_callback(fn, user, structure, name));
    return LSQP_OK;
  });
}

lsqp_status lsqp_problem_set_lower_bounds(lsqp_problem* problem,
                                          const double* lb) {
  return guarded([&]() {
    if (problem == nullptr || lb == nullptr) {
      throw std::invalid_argument("null argument");
    }
    const int n = problem->problem.n_vars;
    problem->problem.lower_bounds =
        Eigen::Map<const lsqp::Vector>(lb, n);
    return LSQP_OK;
  });
}

int lsqp_problem_n_vars(const lsqp_problem* problem) {
  return problem != nullptr ? problem->problem.n_vars : 0;
}

const char* lsqp_problem_variable_name(const lsqp_problem* problem, int i) {
  if (problem == nullptr || i < 0 ||
      i >= static_cast<int>(problem->problem.variable_names.size())) {
    return nullptr;
  }
  return problem->problem.variable_names[static_cast<size_t>(i)].c_str();
}

lsqp_status lsqp_problem_benchmark(const char* name, const char* config_json,
                                   lsqp_problem** out) {
  return guarded([&]() {
    if (name == nullptr || out == nullptr) {
      throw std::invalid_argument("null argument");
    }
    lsqp::bench::BenchmarkCase c = lsqp::bench::make_benchmark(
        name, config_json != nullptr ? config_json : "");
    auto* p = new lsqp_problem;
    p->problem = std::move(c.problem);
    p->defaults = c.default_options;
    *out = p;
    return LSQP_OK;
  });
}

lsqp_status lsqp_benchmark_names_json(char** out_json) {
  return guarded([&]() {
    if (out_json == nullptr) throw std::invalid_argument("out_json is null");
    nlohmann::json names = lsqp::bench::benchmark_names();
    *out_json = dup_string(names.dump());
    if (*out_json == nullptr) throw std::bad_alloc();
    return LSQP_OK;
  });
}

lsqp_status lsqp_benchmark_optimum(const char* name, const char* config_json,
                                   double* x, int n, double* f) {
  return guarded([&]() {
    if (name == nullptr) throw std::invalid_argument("name is null");
    const lsqp::bench::BenchmarkCase c = lsqp::bench::make_benchmark(
        name, config_json != nullptr ? config_json : "");
    if (x != nullptr) {
      if (n != c.optimum.x.size()) {
        throw lsqp::DimensionMismatch("optimum buffer has wrong length");
      }
      Eigen::Map<lsqp::Vector>(x, n) = c.optimum.x;
    }
    if (f != nullptr) *f = c.optimum.f;
    return LSQP_OK;
  });
}

lsqp_status lsqp_solve(const lsqp_problem* problem, lsqp_algorithm algorithm,
                       const double* x0, const lsqp_options* options,
                       lsqp_result** out) {
  return guarded([&]() {
    if (problem == nullptr || x0 == nullptr || out == nullptr) {
      throw std::invalid_argument("null argument");
    }
    const lsqp::Vector start =
        Eigen::Map<const lsqp::Vector>(x0, problem->problem.n_vars);
    lsqp::SolveResult r =
        lsqp::solve(problem->problem, to_algorithm(algorithm), start,
                    resolve_options(problem->defaults, options));
    *out = make_result(std::move(r));
    return LSQP_OK;
  });
}

lsqp_status lsqp_solve_benchmark(const char* name, const char* config_json,
                                 lsqp_algorithm algorithm, const double* x0,
                                 const lsqp_options* options,
                                 lsqp_result** out) {
  return guarded([&]() {
    if (name == nullptr || x0 == nullptr || out == nullptr) {
      throw std::invalid_argument("null argument");
    }
    const lsqp::bench::BenchmarkCase c = lsqp::bench::make_benchmark(
        name, config_json != nullptr ? config_json : "");
    const lsqp::Vector start =
        Eigen::Map<const lsqp::Vector>(x0, c.problem.n_vars);
    lsqp::SolveResult r =
        lsqp::solve(c.problem, to_algorithm(algorithm), start,
                    resolve_options(c.default_options, options));
    *out = make_result(std::move(r));
    return LSQP_OK;
  });
}

void lsqp_result_destroy(lsqp_result* result) { delete result; }

int lsqp_result_iterations(const lsqp_result* result) {
  return result != nullptr ? result->result.iterations : 0;
}

lsqp_termination lsqp_result_termination(const lsqp_result* result) {
  if (result == nullptr) return LSQP_TERM_LINE_SEARCH_FAILURE;
  return static_cast<lsqp_termination>(result->result.termination);
}

const char* lsqp_result_termination_name(const lsqp_result* result) {
  return result != nullptr ? result->termination.c_str() : "";
}

double lsqp_result_objective(const lsqp_result* result) {
  return result != nullptr ? result->result.f_final : 0.0;
}

double lsqp_result_max_violation(const lsqp_result* result) {
  return result != nullptr ? result->result.max_violation : 0.0;
}

double lsqp_result_grad_lagrangian_norm(const lsqp_result* result) {
  return result != nullptr ? result->result.grad_lagrangian_norm : 0.0;
}

const char* lsqp_result_detail(const lsqp_result* result) {
  return result != nullptr ? result->result.detail.c_str() : "";
}

lsqp_status lsqp_result_solution(const lsqp_result* result, double* x, int n) {
  return guarded([&]() {
    if (result == nullptr || x == nullptr) {
      throw std::invalid_argument("null argument");
    }
    if (n != result->result.x_final.size()) {
      throw lsqp::DimensionMismatch("solution buffer has wrong length");
    }
    Eigen::Map<lsqp::Vector>(x, n) = result->result.x_final;
    return LSQP_OK;
  });
}

int lsqp_result_trace_length(const lsqp_result* result) {
  return result != nullptr ? static_cast<int>(result->result.trace.size())
                           : 0;
}

lsqp_status lsqp_result_trace_point(const lsqp_result* result, int index,
                                    double* x, int n, double* f, double* merit,
                                    double* step_norm, double* violation) {
  return guarded([&]() {
    if (result == nullptr) throw std::invalid_argument("result is null");
    if (index < 0 ||
        index >= static_cast<int>(result->result.trace.size())) {
      throw std::invalid_argument("trace index out of range");
    }
    const lsqp::IterationRecord& rec =
        result->result.trace[static_cast<size_t>(index)];
    if (x != nullptr) {
      if (n != rec.x.size()) {
        throw lsqp::DimensionMismatch("trace buffer has wrong length");
      }
      Eigen::Map<lsqp::Vector>(x, n) = rec.x;
    }
    if (f != nullptr) *f = rec.f;
    if (merit != nullptr) *merit = rec.merit;
    if (step_norm != nullptr) *step_norm = rec.step_norm;
    if (violation != nullptr) *violation = rec.constraint_violation;
    return LSQP_OK;
  });
}

lsqp_status lsqp_scan_json(const lsqp_problem* problem, char** out_json) {
  return guarded([&]() {
    if (problem == nullptr || out_json == nullptr) {
      throw std::invalid_argument("null argument");
    }
    const lsqp::gp::CompatibilityReport report =
        lsqp::gp::gp_compatibility_scan(problem->problem);
    *out_json = dup_string(lsqp::gp::report_to_json(report));
    if (*out_json == nullptr) throw std::bad_alloc();
    return LSQP_OK;
  });
}

lsqp_status lsqp_run_experiment_json(const char* config_json,
                                     char** out_summary_json,
                                     char** out_records_csv,
                                     char** out_curves_csv) {
  return guarded([&]() {
    if (config_json == nullptr || out_summary_json == nullptr) {
      throw std::invalid_argument("null argument");
    }
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("bad config JSON: ") + e.what());
    }
    if (!cfg.is_object()) {
      throw std::invalid_argument("config JSON must be an object");
    }
    static const std::vector<std::string> kKeys = {
        "benchmark",      "algorithms",          "trials",
        "guess",          "seed",                "workers",
        "max_iterations", "eps_grad_lagrangian", "eps_step",
        "enforce_positivity", "benchmark_config"};
    for (const auto& [key, value] : cfg.items()) {
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
        throw std::invalid_argument("unknown config key: " + key);
      }
      (void)value;
    }

    lsqp::harness::ExperimentConfig ec;
    ec.benchmark = cfg.at("benchmark").get<std::string>();
    if (cfg.contains("algorithms")) {
      ec.algorithms.clear();
      for (const auto& a : cfg.at("algorithms")) {
        const std::string s = a.get<std::string>();
        if (s == "sqp") {
          ec.algorithms.push_back(lsqp::Algorithm::Sqp);
        } else if (s == "lsqp") {
          ec.algorithms.push_back(lsqp::Algorithm::Lsqp);
        } else {
          throw std::invalid_argument("unknown algorithm: " + s);
        }
      }
    }
    ec.trials_per_cell = cfg.value("trials", 100);
    const std::string guess = cfg.value("guess", "good");
    if (guess == "good") {
      ec.guess_quality = lsqp::harness::GuessQuality::Good;
    } else if (guess == "poor") {
      ec.guess_quality = lsqp::harness::GuessQuality::Poor;
    } else {
      throw std::invalid_argument("guess must be \"good\" or \"poor\"");
    }
    ec.rng_seed = cfg.value("seed", std::uint64_t{0});
    ec.worker_count = cfg.value("workers", 0);
    if (cfg.contains("max_iterations")) {
      ec.overrides.max_iterations = cfg.at("max_iterations").get<int>();
    }
    if (cfg.contains("eps_grad_lagrangian")) {
      ec.overrides.eps_grad_lagrangian =
          cfg.at("eps_grad_lagrangian").get<double>();
    }
    if (cfg.contains("eps_step")) {
      ec.overrides.eps_step = cfg.at("eps_step").get<double>();
    }
    if (cfg.contains("enforce_positivity")) {
      ec.overrides.enforce_positivity =
          cfg.at("enforce_positivity").get<bool>();
    }
    if (cfg.contains("benchmark_config")) {
      ec.benchmark_config_json = cfg.at("benchmark_config").dump();
    }

    const lsqp::harness::ExperimentResult result =
        lsqp::harness::run_experiment(ec);
    *out_summary_json =
        dup_string(lsqp::harness::summary_to_json(result.summary));
    if (*out_summary_json == nullptr) throw std::bad_alloc();
    if (out_records_csv != nullptr) {
      *out_records_csv = dup_string(lsqp::harness::records_to_csv(
          result.summary.benchmark, result.records));
      if (*out_records_csv == nullptr) throw std::bad_alloc();
    }
    if (out_curves_csv != nullptr) {
      *out_curves_csv =
          dup_string(lsqp::harness::curves_to_csv(result.summary));
      if (*out_curves_csv == nullptr) throw std::bad_alloc();
    }
    return LSQP_OK;
  });
}

}  // extern "C"
