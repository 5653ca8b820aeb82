#ifndef LSQP_LSQP_H
#define LSQP_LSQP_H

/*
 * C interface to the logspace sequential quadratic programming library.
 *
 * All entry points return an lsqp_status (except trivial accessors), never
 * throw, and report failure details through lsqp_last_error(). Handles are
 * opaque; destroy them with the matching *_destroy function. Strings
 * returned through char** parameters are heap-allocated and must be released
 * with lsqp_string_free().
 */

#include <stdint.h>

#if defined(_WIN32)
#define LSQP_API __declspec(dllexport)
#else
#define LSQP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsqp_status {
  LSQP_OK = 0,
  LSQP_ERR_INVALID_ARGUMENT = 1,
  LSQP_ERR_UNKNOWN_PROBLEM = 2,
  LSQP_ERR_MISSING_CONSTANTS = 3,
  LSQP_ERR_DIMENSION = 4,
  LSQP_ERR_NONFINITE = 5,
  LSQP_ERR_TRANSFORM = 6,
  LSQP_ERR_NUMERICAL = 7,
  LSQP_ERR_INTERNAL = 8
} lsqp_status;

typedef enum lsqp_algorithm {
  LSQP_ALGO_SQP = 0,
  LSQP_ALGO_LSQP = 1
} lsqp_algorithm;

typedef enum lsqp_termination {
  LSQP_TERM_GRAD_LAGRANGIAN = 0,
  LSQP_TERM_SMALL_STEP = 1,
  LSQP_TERM_MAX_ITER = 2,
  LSQP_TERM_LINE_SEARCH_FAILURE = 3,
  LSQP_TERM_TRANSFORM_FAILURE = 4
} lsqp_termination;

/* Structure tag for user-supplied functions; drives the compatibility scan
 * only, never the solver. */
typedef enum lsqp_structure {
  LSQP_STRUCTURE_MONOMIAL = 0,
  LSQP_STRUCTURE_POSYNOMIAL = 1,
  LSQP_STRUCTURE_SIGNOMIAL = 2,
  LSQP_STRUCTURE_OPAQUE = 3
} lsqp_structure;

typedef struct lsqp_problem lsqp_problem;
typedef struct lsqp_result lsqp_result;

/* Evaluation callback for black-box functions. Write the value at x (an
 * array of n doubles) into *value; when grad is non-NULL, write the n
 * partial derivatives into grad. Return 0 on success, nonzero to signal an
 * evaluation failure. user is the pointer registered with the function. */
typedef int (*lsqp_eval_fn)(const double* x, int n, double* value,
                            double* grad, void* user);

/* Solver settings. Zero or negative numeric fields keep the problem's
 * defaults; enforce_positivity < 0 keeps the default, 0/1 forces it. */
typedef struct lsqp_options {
  int max_iterations;
  double eps_grad_lagrangian;
  double eps_step;
  int enforce_positivity;
} lsqp_options;

LSQP_API const char* lsqp_version(void);

/* Message for the most recent failure on this thread. Valid until the next
 * library call from the same thread. */
LSQP_API const char* lsqp_last_error(void);

LSQP_API void lsqp_string_free(char* s);

/* ---- Problem construction ------------------------------------------- */

/* Creates an empty problem with n_vars strictly positive variables. */
LSQP_API lsqp_status lsqp_problem_create(int n_vars, lsqp_problem** out);

LSQP_API void lsqp_problem_destroy(lsqp_problem* problem);

/* Objective and constraints in standard form: the objective is minimized,
 * inequalities mean fn(x) <= 1, equalities mean fn(x) = 1. */
LSQP_API lsqp_status lsqp_problem_set_objective(lsqp_problem* problem,
                                                lsqp_eval_fn fn, void* user,
                                                lsqp_structure structure,
                                                const char* name);
LSQP_API lsqp_status lsqp_problem_add_inequality(lsqp_problem* problem,
                                                 lsqp_eval_fn fn, void* user,
                                                 lsqp_structure structure,
                                                 const char* name);
LSQP_API lsqp_status lsqp_problem_add_equality(lsqp_problem* problem,
                                               lsqp_eval_fn fn, void* user,
                                               lsqp_structure structure,
                                               const char* name);

/* Elementwise variable floors (length n_vars). Unset floors default to
 * 1e-6. */
LSQP_API lsqp_status lsqp_problem_set_lower_bounds(lsqp_problem* problem,
                                                   const double* lb);

LSQP_API int lsqp_problem_n_vars(const lsqp_problem* problem);

/* Name of variable i, or NULL when out of range. The pointer stays valid
 * for the problem's lifetime. */
LSQP_API const char* lsqp_problem_variable_name(const lsqp_problem* problem,
                                                int i);

/* ---- Built-in benchmark problems ------------------------------------ */

/* Instantiates a named benchmark ("boyd", "rosenbrock", "floudas",
 * "kirschen_ozturk"). config_json may be NULL/empty or a JSON object; for
 * kirschen_ozturk a "constants" member replaces the full constant table. */
LSQP_API lsqp_status lsqp_problem_benchmark(const char* name,
                                            const char* config_json,
                                            lsqp_problem** out);

/* JSON array of the available benchmark names. */
LSQP_API lsqp_status lsqp_benchmark_names_json(char** out_json);

/* Reference optimum of a benchmark: fills x (length n, when non-NULL) and
 * *f (when non-NULL). */
LSQP_API lsqp_status lsqp_benchmark_optimum(const char* name,
                                            const char* config_json,
                                            double* x, int n, double* f);

/* ---- Solving --------------------------------------------------------- */

/* Solves the problem from x0 (length n_vars). options may be NULL. */
LSQP_API lsqp_status lsqp_solve(const lsqp_problem* problem,
                                lsqp_algorithm algorithm, const double* x0,
                                const lsqp_options* options,
                                lsqp_result** out);

/* Convenience: instantiate a benchmark and solve it with its per-problem
 * default settings merged with options. */
LSQP_API lsqp_status lsqp_solve_benchmark(const char* name,
                                          const char* config_json,
                                          lsqp_algorithm algorithm,
                                          const double* x0,
                                          const lsqp_options* options,
                                          lsqp_result** out);

/* ---- Results --------------------------------------------------------- */

LSQP_API void lsqp_result_destroy(lsqp_result* result);

LSQP_API int lsqp_result_iterations(const lsqp_result* result);
LSQP_API lsqp_termination lsqp_result_termination(const lsqp_result* result);
LSQP_API const char* lsqp_result_termination_name(const lsqp_result* result);
LSQP_API double lsqp_result_objective(const lsqp_result* result);
LSQP_API double lsqp_result_max_violation(const lsqp_result* result);
LSQP_API double lsqp_result_grad_lagrangian_norm(const lsqp_result* result);
LSQP_API const char* lsqp_result_detail(const lsqp_result* result);

/* Final point; x must hold n doubles matching the problem dimension. */
LSQP_API lsqp_status lsqp_result_solution(const lsqp_result* result,
                                          double* x, int n);

/* Iterate trace: trace_length = iterations + 1 entries (initial point
 * included). Any output pointer may be NULL; x needs n doubles. */
LSQP_API int lsqp_result_trace_length(const lsqp_result* result);
LSQP_API lsqp_status lsqp_result_trace_point(const lsqp_result* result,
                                             int index, double* x, int n,
                                             double* f, double* merit,
                                             double* step_norm,
                                             double* violation);

/* ---- Structure scan and experiments ---------------------------------- */

/* GP-compatibility census of the problem as a JSON report. */
LSQP_API lsqp_status lsqp_scan_json(const lsqp_problem* problem,
                                    char** out_json);

/* Runs a Monte Carlo experiment described by a JSON object:
 *   {"benchmark": "boyd", "algorithms": ["sqp", "lsqp"], "trials": 100,
 *    "guess": "good" | "poor", "seed": 7, "workers": 0,
 *    "max_iterations": 500, "eps_grad_lagrangian": 1e-6, "eps_step": 1e-8,
 *    "enforce_positivity": false, "benchmark_config": {...}}
 * Only "benchmark" is required. Outputs: the summary JSON (always), and when
 * the pointers are non-NULL, the per-trial CSV and convergence-curve CSV. */
LSQP_API lsqp_status lsqp_run_experiment_json(const char* config_json,
                                              char** out_summary_json,
                                              char** out_records_csv,
                                              char** out_curves_csv);

#ifdef __cplusplus
}
#endif

#endif /* LSQP_LSQP_H */
