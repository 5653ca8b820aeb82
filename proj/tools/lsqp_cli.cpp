// Command-line frontend for the lsqp shared library. Talks to the solver
// exclusively through the C API in lsqp/lsqp.h; CLI11 and nlohmann::json are
// used for argument parsing and presentation only.

#include <lsqp/lsqp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Takes ownership of a C-API string, copies it, and frees the original.
[[nodiscard]] std::string take_string(char* s) {
  if (s == nullptr) return {};
  std::string out{s};
  lsqp_string_free(s);
  return out;
}

[[nodiscard]] int report_error(lsqp_status status, const std::string& where) {
  std::cerr << "error: " << where << ": " << lsqp_last_error() << "\n";
  return (status == LSQP_ERR_UNKNOWN_PROBLEM ||
          status == LSQP_ERR_INVALID_ARGUMENT ||
          status == LSQP_ERR_DIMENSION)
             ? kExitUsage
             : kExitRuntime;
}

[[nodiscard]] std::string format_double(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Flag values shared by the solve and bench subcommands.
struct CommonFlags {
  std::string problem;
  std::string algo{"both"};
  int max_iter{0};
  double eps_gl{0.0};
  double eps_dx{0.0};
  int enforce_positivity{-1};  // -1 keeps the per-problem default
  std::string format{"md"};
};

void add_tolerance_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--max-iter", flags.max_iter, "Iteration budget");
  cmd->add_option("--eps-gl", flags.eps_gl,
                  "Lagrangian-gradient tolerance (inf norm)");
  cmd->add_option("--eps-dx", flags.eps_dx, "Step-size tolerance (2-norm)");
  cmd->add_flag_callback(
      "--enforce-positivity", [&flags]() { flags.enforce_positivity = 1; },
      "Reject line-search trial points that leave the transformable region");
  cmd->add_flag_callback(
      "--no-enforce-positivity", [&flags]() { flags.enforce_positivity = 0; },
      "Accept such trial points even on problems that default to rejecting "
      "them");
}

void print_common_config(std::ostream& os, const CommonFlags& flags) {
  os << "  max_iterations: "
     << (flags.max_iter > 0 ? std::to_string(flags.max_iter)
                            : std::string("500 (default)"))
     << "\n";
  os << "  eps_grad_lagrangian: "
     << (flags.eps_gl > 0.0 ? format_double(flags.eps_gl)
                            : std::string("1e-06 (default)"))
     << "\n";
  os << "  eps_step: "
     << (flags.eps_dx > 0.0 ? format_double(flags.eps_dx)
                            : std::string("1e-08 (default)"))
     << "\n";
  os << "  enforce_positivity: "
     << (flags.enforce_positivity < 0
             ? std::string("per-problem default")
             : std::string(flags.enforce_positivity != 0 ? "true" : "false"))
     << "\n";
}

[[nodiscard]] lsqp_options to_options(const CommonFlags& flags) {
  lsqp_options o{};
  o.max_iterations = flags.max_iter;
  o.eps_grad_lagrangian = flags.eps_gl;
  o.eps_step = flags.eps_dx;
  o.enforce_positivity = flags.enforce_positivity;
  return o;
}

[[nodiscard]] std::vector<std::string> benchmark_names() {
  char* raw = nullptr;
  if (lsqp_benchmark_names_json(&raw) != LSQP_OK) return {};
  const json names = json::parse(take_string(raw));
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(n.get<std::string>());
  return out;
}

[[nodiscard]] std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("LSQP_OUT_DIR");
      env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

// ---- list ---------------------------------------------------------------

int cmd_list(const std::string& format) {
  std::cerr << "config:\n  subcommand: list\n  format: " << format << "\n";
  char* raw = nullptr;
  const lsqp_status st = lsqp_benchmark_names_json(&raw);
  if (st != LSQP_OK) return report_error(st, "listing benchmarks");
  const std::string names_json = take_string(raw);
  if (format == "json") {
    std::cout << names_json << "\n";
    return kExitOk;
  }
  std::cout << "| problem | variables |\n| --- | --- |\n";
  for (const auto& name : json::parse(names_json)) {
    lsqp_problem* p = nullptr;
    const std::string n = name.get<std::string>();
    if (lsqp_problem_benchmark(n.c_str(), nullptr, &p) != LSQP_OK) continue;
    std::cout << "| " << n << " | " << lsqp_problem_n_vars(p) << " |\n";
    lsqp_problem_destroy(p);
  }
  return kExitOk;
}

// ---- scan ---------------------------------------------------------------

int cmd_scan(const std::string& problem, const std::string& format) {
  std::cerr << "config:\n  subcommand: scan\n  problem: " << problem
            << "\n  format: " << format << "\n";
  lsqp_problem* p = nullptr;
  lsqp_status st = lsqp_problem_benchmark(problem.c_str(), nullptr, &p);
  if (st != LSQP_OK) return report_error(st, "instantiating " + problem);
  char* raw = nullptr;
  st = lsqp_scan_json(p, &raw);
  lsqp_problem_destroy(p);
  if (st != LSQP_OK) return report_error(st, "scanning " + problem);
  const std::string report = take_string(raw);
  if (format == "json") {
    std::cout << report << "\n";
    return kExitOk;
  }
  const json j = json::parse(report);
  std::cout << "| function | structure |\n| --- | --- |\n";
  for (const auto& entry : j.at("entries")) {
    std::cout << "| " << entry.at("name").get<std::string>() << " | "
              << entry.at("structure").get<std::string>() << " |\n";
  }
  std::cout << "\ncensus: " << j.at("monomial").get<int>() << " monomial, "
            << j.at("posynomial").get<int>() << " posynomial, "
            << j.at("signomial").get<int>() << " signomial, "
            << j.at("opaque").get<int>() << " opaque\n";
  std::cout << "compatible fraction: "
            << format_double(j.at("compatible_fraction").get<double>(),
                             "%.4f")
            << "\n";
  std::cout << "recommendation: "
            << (j.at("recommend_logspace").get<bool>()
                    ? "log-space solve recommended"
                    : "log-space solve not recommended")
            << "\n";
  return kExitOk;
}

// ---- solve --------------------------------------------------------------

[[nodiscard]] std::optional<std::vector<double>> parse_x0(
    const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss{spec};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      while (pos < item.size() &&
             std::isspace(static_cast<unsigned char>(item[pos])) != 0) {
        ++pos;
      }
      if (pos != item.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

int cmd_solve(const CommonFlags& flags, const std::string& x0_spec) {
  lsqp_problem* problem = nullptr;
  lsqp_status st =
      lsqp_problem_benchmark(flags.problem.c_str(), nullptr, &problem);
  if (st != LSQP_OK) return report_error(st, "instantiating " + flags.problem);
  const int n = lsqp_problem_n_vars(problem);

  std::vector<double> x0(static_cast<size_t>(n), 0.0);
  if (x0_spec.empty()) {
    // Default start: the problem's reference optimum.
    st = lsqp_benchmark_optimum(flags.problem.c_str(), nullptr, x0.data(), n,
                                nullptr);
    if (st != LSQP_OK) {
      lsqp_problem_destroy(problem);
      return report_error(st, "fetching reference optimum");
    }
  } else {
    const auto parsed = parse_x0(x0_spec);
    if (!parsed || static_cast<int>(parsed->size()) != n) {
      std::cerr << "error: --x0 must be " << n
                << " comma-separated numbers for " << flags.problem << "\n";
      lsqp_problem_destroy(problem);
      return kExitUsage;
    }
    x0 = *parsed;
  }

  std::cerr << "config:\n  subcommand: solve\n  problem: " << flags.problem
            << "\n  algorithm: " << flags.algo << "\n  x0:";
  for (double v : x0) std::cerr << ' ' << format_double(v);
  std::cerr << "\n";
  print_common_config(std::cerr, flags);
  std::cerr << "  format: " << flags.format << "\n";

  const lsqp_algorithm algo =
      flags.algo == "sqp" ? LSQP_ALGO_SQP : LSQP_ALGO_LSQP;
  const lsqp_options options = to_options(flags);
  lsqp_result* result = nullptr;
  st = lsqp_solve(problem, algo, x0.data(), &options, &result);
  if (st != LSQP_OK) {
    lsqp_problem_destroy(problem);
    return report_error(st, "solving " + flags.problem);
  }

  const int trace_length = lsqp_result_trace_length(result);
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  json jtrace = json::array();
  for (int i = 0; i < trace_length; ++i) {
    double f = 0.0, merit = 0.0, step = 0.0, violation = 0.0;
    if (lsqp_result_trace_point(result, i, x.data(), n, &f, &merit, &step,
                                &violation) != LSQP_OK) {
      break;
    }
    jtrace.push_back({{"iter", i},
                      {"x", x},
                      {"f", f},
                      {"merit", merit},
                      {"step_norm", step},
                      {"violation", violation}});
  }

  const std::string termination = lsqp_result_termination_name(result);
  const lsqp_termination term = lsqp_result_termination(result);
  (void)lsqp_result_solution(result, x.data(), n);

  if (flags.format == "json") {
    json out = {{"problem", flags.problem},
                {"algorithm", flags.algo},
                {"termination", termination},
                {"iterations", lsqp_result_iterations(result)},
                {"objective", lsqp_result_objective(result)},
                {"max_violation", lsqp_result_max_violation(result)},
                {"grad_lagrangian_norm",
                 lsqp_result_grad_lagrangian_norm(result)},
                {"detail", lsqp_result_detail(result)},
                {"x", x},
                {"trace", jtrace}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "| iter | f | merit | step | violation |\n"
              << "| --- | --- | --- | --- | --- |\n";
    for (const auto& row : jtrace) {
      std::cout << "| " << row.at("iter").get<int>() << " | "
                << format_double(row.at("f").get<double>(), "%.9g") << " | "
                << format_double(row.at("merit").get<double>(), "%.9g")
                << " | " << format_double(row.at("step_norm").get<double>())
                << " | " << format_double(row.at("violation").get<double>(),
                                          "%.3g")
                << " |\n";
    }
    std::cout << "\ntermination: " << termination << " after "
              << lsqp_result_iterations(result) << " iterations\n";
    std::cout << "objective: "
              << format_double(lsqp_result_objective(result), "%.9g") << "\n";
    std::cout << "max violation: "
              << format_double(lsqp_result_max_violation(result), "%.3g")
              << "\n";
    std::cout << "grad Lagrangian (inf norm): "
              << format_double(lsqp_result_grad_lagrangian_norm(result),
                               "%.3g")
              << "\n";
    std::cout << "x:";
    for (int i = 0; i < n; ++i) {
      const char* name = lsqp_problem_variable_name(problem, i);
      std::cout << ' ' << (name != nullptr ? name : "?") << '='
                << format_double(x[static_cast<size_t>(i)], "%.9g");
    }
    std::cout << "\n";
    const std::string detail = lsqp_result_detail(result);
    if (!detail.empty()) std::cout << "detail: " << detail << "\n";
  }

  lsqp_result_destroy(result);
  lsqp_problem_destroy(problem);
  if (term == LSQP_TERM_TRANSFORM_FAILURE ||
      term == LSQP_TERM_LINE_SEARCH_FAILURE) {
    std::cerr << "error: solve failed with status " << termination << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

// ---- bench --------------------------------------------------------------

struct BenchFlags {
  CommonFlags common;
  std::string guess{"good"};
  int trials{100};
  std::uint64_t seed{0};
  int workers{0};
  std::string out_dir;
};

[[nodiscard]] std::string cell_name(const std::string& benchmark,
                                    const std::string& guess) {
  return benchmark + "_" + guess;
}

// Runs one (benchmark, guess) cell and prints its table; returns an exit
// code.
int run_bench_cell(const BenchFlags& flags, const std::string& benchmark,
                   const std::string& guess, const std::string& out_dir) {
  json cfg = {{"benchmark", benchmark}, {"guess", guess},
              {"trials", flags.trials}, {"seed", flags.seed},
              {"workers", flags.workers}};
  if (flags.common.algo != "both") {
    cfg["algorithms"] = json::array({flags.common.algo});
  }
  if (flags.common.max_iter > 0) {
    cfg["max_iterations"] = flags.common.max_iter;
  }
  if (flags.common.eps_gl > 0.0) {
    cfg["eps_grad_lagrangian"] = flags.common.eps_gl;
  }
  if (flags.common.eps_dx > 0.0) cfg["eps_step"] = flags.common.eps_dx;
  if (flags.common.enforce_positivity >= 0) {
    cfg["enforce_positivity"] = flags.common.enforce_positivity != 0;
  }

  char* raw_summary = nullptr;
  char* raw_records = nullptr;
  char* raw_curves = nullptr;
  const lsqp_status st = lsqp_run_experiment_json(
      cfg.dump().c_str(), &raw_summary, &raw_records, &raw_curves);
  if (st != LSQP_OK) {
    return report_error(st, "running " + cell_name(benchmark, guess));
  }
  const std::string summary_json = take_string(raw_summary);
  const std::string records_csv = take_string(raw_records);
  const std::string curves_csv = take_string(raw_curves);

  const std::string stem = out_dir + "/" + cell_name(benchmark, guess);
  for (const auto& [path, content] :
       {std::pair{stem + "_summary.json", &summary_json},
        std::pair{stem + "_records.csv", &records_csv},
        std::pair{stem + "_curves.csv", &curves_csv}}) {
    std::ofstream out{path};
    if (!out) {
      std::cerr << "error: cannot write " << path << "\n";
      return kExitRuntime;
    }
    out << *content;
    std::cerr << "wrote " << path << "\n";
  }

  if (flags.common.format == "json") {
    std::cout << summary_json << "\n";
    return kExitOk;
  }
  if (flags.common.format == "csv") {
    std::cout << records_csv;
    return kExitOk;
  }

  double f_star = 0.0;
  if (lsqp_benchmark_optimum(benchmark.c_str(), nullptr, nullptr, 0,
                             &f_star) != LSQP_OK) {
    return report_error(LSQP_ERR_INTERNAL, "fetching reference optimum");
  }

  const json summary = json::parse(summary_json);
  struct Column {
    std::string objective{"-"};
    std::string rel_error{"-"};
    std::string mean_iters{"-"};
    std::string failures{"-"};
  };
  std::vector<std::string> headers;
  std::vector<Column> columns;
  std::optional<double> sqp_mean;
  for (const auto& a : summary.at("algorithms")) {
    if (a.at("algorithm") == "sqp" && !a.at("mean_iterations").is_null()) {
      sqp_mean = a.at("mean_iterations").get<double>();
    }
  }
  for (const auto& a : summary.at("algorithms")) {
    Column col;
    const std::string name = a.at("algorithm").get<std::string>();
    if (!a.at("best_objective").is_null()) {
      const double best = a.at("best_objective").get<double>();
      col.objective = format_double(best, "%.7g");
      col.rel_error = format_double(
          std::abs(best - f_star) / std::max(std::abs(f_star), 1e-300),
          "%.2e");
    }
    if (!a.at("mean_iterations").is_null()) {
      const double mean = a.at("mean_iterations").get<double>();
      col.mean_iters = format_double(mean, "%.2f");
      if (name == "lsqp" && sqp_mean && *sqp_mean > 0.0) {
        col.mean_iters += " (" +
                          format_double(100.0 * (mean - *sqp_mean) / *sqp_mean,
                                        "%+.1f") +
                          "%)";
      }
    }
    const int failures = a.at("failures").get<int>();
    const double rate = a.at("failure_rate").get<double>();
    col.failures = std::to_string(failures) + " (" +
                   format_double(100.0 * rate, "%.2f") + "%)";
    headers.push_back(name == "sqp" ? "SQP" : "LSQP");
    columns.push_back(col);
  }

  std::cout << "\n## " << benchmark << " / " << guess << " guesses ("
            << summary.at("trials_per_cell").get<int>() << " trials, seed "
            << summary.at("rng_seed").get<std::uint64_t>() << ")\n\n";
  std::cout << "| | Optimum |";
  for (const auto& h : headers) std::cout << ' ' << h << " |";
  std::cout << "\n| --- | --- |";
  for (size_t i = 0; i < headers.size(); ++i) std::cout << " --- |";
  std::cout << "\n| Objective | " << format_double(f_star, "%.7g") << " |";
  for (const auto& c : columns) std::cout << ' ' << c.objective << " |";
  std::cout << "\n| Relative error | - |";
  for (const auto& c : columns) std::cout << ' ' << c.rel_error << " |";
  std::cout << "\n| Mean iterations | - |";
  for (const auto& c : columns) std::cout << ' ' << c.mean_iters << " |";
  std::cout << "\n| Failures | - |";
  for (const auto& c : columns) std::cout << ' ' << c.failures << " |";
  std::cout << "\n";
  return kExitOk;
}

int cmd_bench(const BenchFlags& flags) {
  const std::string out_dir = resolve_out_dir(flags.out_dir);

  std::cerr << "config:\n  subcommand: bench\n  problem: "
            << flags.common.problem << "\n  algorithm: " << flags.common.algo
            << "\n  guess: " << flags.guess << "\n  trials: " << flags.trials
            << "\n  seed: " << flags.seed << "\n  workers: "
            << (flags.workers > 0 ? std::to_string(flags.workers)
                                  : std::string("auto"))
            << "\n";
  print_common_config(std::cerr, flags.common);
  std::cerr << "  format: " << flags.common.format
            << "\n  out_dir: " << out_dir << "\n";

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << ": "
              << ec.message() << "\n";
    return kExitRuntime;
  }

  std::vector<std::string> problems;
  if (flags.common.problem == "all") {
    problems = benchmark_names();
  } else {
    problems.push_back(flags.common.problem);
  }
  std::vector<std::string> guesses;
  if (flags.guess == "both") {
    guesses = {"good", "poor"};
  } else {
    guesses.push_back(flags.guess);
  }

  for (const auto& problem : problems) {
    for (const auto& guess : guesses) {
      const int rc = run_bench_cell(flags, problem, guess, out_dir);
      if (rc != kExitOk) return rc;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("lsqp ") + lsqp_version() +
               " - sequential quadratic programming with a log-space variant"};
  app.require_subcommand(1);

  // list
  std::string list_format{"md"};
  CLI::App* list = app.add_subcommand("list", "List built-in problems");
  list->add_option("--format", list_format, "Output format")
      ->check(CLI::IsMember({"md", "json"}));

  // scan
  std::string scan_problem;
  std::string scan_format{"md"};
  CLI::App* scan = app.add_subcommand(
      "scan", "Report geometric-programming compatibility of a problem");
  scan->add_option("--problem", scan_problem, "Problem name")->required();
  scan->add_option("--format", scan_format, "Output format")
      ->check(CLI::IsMember({"md", "json"}));

  // solve
  CommonFlags solve_flags;
  solve_flags.algo = "lsqp";
  std::string x0_spec;
  CLI::App* solve = app.add_subcommand("solve", "Run a single solve");
  solve->add_option("--problem", solve_flags.problem, "Problem name")
      ->required();
  solve->add_option("--algo", solve_flags.algo, "Algorithm")
      ->check(CLI::IsMember({"sqp", "lsqp"}));
  solve->add_option("--x0", x0_spec,
                    "Comma-separated start point (default: the reference "
                    "optimum)");
  add_tolerance_flags(solve, solve_flags);
  solve->add_option("--format", solve_flags.format, "Output format")
      ->check(CLI::IsMember({"md", "json"}));

  // bench
  BenchFlags bench_flags;
  CLI::App* bench =
      app.add_subcommand("bench", "Run a Monte Carlo benchmark cell");
  bench->add_option("--problem", bench_flags.common.problem,
                    "Problem name, or \"all\"")
      ->required();
  bench->add_option("--algo", bench_flags.common.algo, "Algorithms to run")
      ->check(CLI::IsMember({"sqp", "lsqp", "both"}));
  bench->add_option("--guess", bench_flags.guess, "Initial-guess quality")
      ->check(CLI::IsMember({"good", "poor", "both"}));
  bench->add_option("--trials", bench_flags.trials, "Trials per cell")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_flags.seed, "Random seed");
  bench->add_option("--workers", bench_flags.workers,
                    "Worker threads (0 = auto)");
  add_tolerance_flags(bench, bench_flags.common);
  bench->add_option("--format", bench_flags.common.format, "Output format")
      ->check(CLI::IsMember({"md", "csv", "json"}));
  bench->add_option("--out", bench_flags.out_dir,
                    "Artifact directory (default: $LSQP_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list(list_format);
    if (scan->parsed()) return cmd_scan(scan_problem, scan_format);
    if (solve->parsed()) return cmd_solve(solve_flags, x0_spec);
    if (bench->parsed()) return cmd_bench(bench_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
