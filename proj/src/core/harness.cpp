#include "core/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <utility>

namespace lsqp::harness {

std::uint64_t trial_seed(std::uint64_t experiment_seed, int trial_index) {
  SplitMix64 mixer(experiment_seed ^
                   (0x9e3779b97f4a7c15ull *
                    static_cast<std::uint64_t>(trial_index + 1)));
  return mixer.next();
}

std::string guess_quality_name(GuessQuality q) {
  return q == GuessQuality::Good ? "good" : "poor";
}

double guess_delta(GuessQuality q) {
  return q == GuessQuality::Good ? 0.10 : 0.80;
}

Vector sample_initial_guess(const Vector& optimum, GuessQuality quality,
                            SplitMix64& rng, const Vector& floors) {
  const double delta = guess_delta(quality);
  Vector x0(optimum.size());
  for (Eigen::Index i = 0; i < optimum.size(); ++i) {
    const double lo = optimum[i] * (1.0 - delta);
    const double hi = optimum[i] * (1.0 + delta);
    x0[i] = std::max(rng.uniform(lo, hi), floors[i]);
  }
  return x0;
}

bool usable_common_start(const Problem& problem, const Vector& x0) {
  try {
    const Evaluation ev = evaluate_point(problem, x0);
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(ev.f)) return false;
    for (Eigen::Index i = 0; i < ev.g.size(); ++i) {
      if (!positive(ev.g[i])) return false;
    }
    for (Eigen::Index j = 0; j < ev.h.size(); ++j) {
      if (!positive(ev.h[j])) return false;
    }
    return true;
  } catch (...) {
    return false;
  }
}

SolverOptions merge_options(const SolverOptions& base,
                            const SolverOverrides& overrides) {
  SolverOptions out = base;
  if (overrides.max_iterations) out.max_iterations = *overrides.max_iterations;
  if (overrides.eps_grad_lagrangian) {
    out.eps_grad_lagrangian = *overrides.eps_grad_lagrangian;
  }
  if (overrides.eps_step) out.eps_step = *overrides.eps_step;
  if (overrides.enforce_positivity) {
    out.enforce_positivity_in_linesearch = *overrides.enforce_positivity;
  }
  return out;
}

TrialRecord run_trial(const bench::BenchmarkCase& c, Algorithm algorithm,
                      const Vector& x0, const SolverOptions& options) {
  TrialRecord rec;
  rec.algorithm = algorithm;
  rec.x0 = x0;

  const auto start = std::chrono::steady_clock::now();
  try {
    const SolveResult result = solve(c.problem, algorithm, x0, options);
    rec.termination = result.termination;
    rec.iterations = result.iterations;
    rec.f_final = result.f_final;
    rec.x_final = result.x_final;
    rec.multipliers = result.multipliers;
    rec.max_violation = result.max_violation;
    rec.outcome = bench::classify(c, result);
    rec.rel_obj_error =
        std::abs(result.f_final - c.optimum.f) / std::abs(c.optimum.f);
  } catch (const TransformFailure&) {
    rec.outcome = bench::Outcome::TransformFailure;
    rec.termination = Termination::TransformFailure;
    rec.x_final = x0;
    rec.rel_obj_error = std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception&) {
    rec.outcome = bench::Outcome::LineSearchFailure;
    rec.termination = Termination::LineSearchFailure;
    rec.x_final = x0;
    rec.rel_obj_error = std::numeric_limits<double>::quiet_NaN();
  }
  const auto stop = std::chrono::steady_clock::now();
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return rec;
}

namespace {

[[nodiscard]] AlgorithmSummary summarize_algorithm(
    const std::string& name, const std::vector<TrialRecord>& records,
    const Vector& x_star, int max_iterations) {
  AlgorithmSummary s;
  s.algorithm = name;
  s.trials = static_cast<int>(records.size());

  long iteration_sum = 0;
  double obj_error_sum = 0.0;
  Vector error_sum = Vector::Zero(x_star.size());
  for (const TrialRecord& rec : records) {
    s.outcome_counts[bench::outcome_name(rec.outcome)] += 1;
    if (rec.outcome == bench::Outcome::Success) {
      s.successes += 1;
      iteration_sum += rec.iterations;
      obj_error_sum += rec.rel_obj_error;
      if (!s.best_objective || rec.f_final < *s.best_objective) {
        s.best_objective = rec.f_final;
      }
      error_sum += (rec.x_final - x_star)
                       .cwiseAbs()
                       .cwiseQuotient(x_star.cwiseAbs());
    }
  }
  s.failures = s.trials - s.successes;
  s.failure_rate =
      s.trials > 0 ? static_cast<double>(s.failures) / s.trials : 0.0;
  if (s.successes > 0) {
    s.mean_iterations = static_cast<double>(iteration_sum) / s.successes;
    s.mean_rel_obj_error = obj_error_sum / s.successes;
    const Vector mean_err = error_sum / s.successes;
    s.mean_rel_variable_error.assign(mean_err.data(),
                                     mean_err.data() + mean_err.size());
  }

  s.convergence_curve.assign(static_cast<size_t>(max_iterations), 0.0);
  for (const TrialRecord& rec : records) {
    if (rec.outcome != bench::Outcome::Success) continue;
    const int from = std::max(rec.iterations, 1);
    for (int k = from; k <= max_iterations; ++k) {
      s.convergence_curve[static_cast<size_t>(k - 1)] += 1.0;
    }
  }
  if (s.trials > 0) {
    for (double& p : s.convergence_curve) p /= s.trials;
  }
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials_per_cell < 1) {
    throw std::invalid_argument("trials_per_cell must be at least 1");
  }
  if (config.algorithms.empty()) {
    throw std::invalid_argument("no algorithms requested");
  }

  ExperimentResult out;
  out.benchmark =
      bench::make_benchmark(config.benchmark, config.benchmark_config_json);
  out.options = merge_options(out.benchmark.default_options, config.overrides);

  const int trials = config.trials_per_cell;
  const int n_algos = static_cast<int>(config.algorithms.size());

  // All algorithms share the same initial guesses, sampled once up front
  // from per-trial substreams. A draw only counts when every algorithm can
  // start from it: the evaluation must be finite and strictly positive so
  // the log transform is defined at x0. Invalid draws are resampled.
  std::vector<Vector> guesses(static_cast<size_t>(trials));
  std::vector<std::uint64_t> seeds(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    seeds[static_cast<size_t>(t)] = trial_seed(config.rng_seed, t);
    SplitMix64 rng(seeds[static_cast<size_t>(t)]);
    Vector x0 =
        sample_initial_guess(out.benchmark.optimum.x, config.guess_quality,
                             rng, out.benchmark.problem.lower_bounds);
    for (int attempt = 0;
         attempt < 100 && !usable_common_start(out.benchmark.problem, x0);
         ++attempt) {
      x0 = sample_initial_guess(out.benchmark.optimum.x, config.guess_quality,
                                rng, out.benchmark.problem.lower_bounds);
    }
    guesses[static_cast<size_t>(t)] = x0;
  }

  out.records.assign(static_cast<size_t>(n_algos),
                     std::vector<TrialRecord>(static_cast<size_t>(trials)));

  const int total_jobs = n_algos * trials;
  int workers = config.worker_count > 0
                    ? config.worker_count
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, total_jobs));

  std::atomic<int> next_job{0};
  auto work = [&]() {
    while (true) {
      const int job = next_job.fetch_add(1);
      if (job >= total_jobs) break;
      const int a = job / trials;
      const int t = job % trials;
      TrialRecord rec =
          run_trial(out.benchmark, config.algorithms[static_cast<size_t>(a)],
                    guesses[static_cast<size_t>(t)], out.options);
      rec.trial_index = t;
      rec.seed = seeds[static_cast<size_t>(t)];
      out.records[static_cast<size_t>(a)][static_cast<size_t>(t)] =
          std::move(rec);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  out.summary.benchmark = config.benchmark;
  out.summary.guess_quality = guess_quality_name(config.guess_quality);
  out.summary.rng_seed = config.rng_seed;
  out.summary.trials_per_cell = trials;
  out.summary.max_iterations = out.options.max_iterations;
  for (int a = 0; a < n_algos; ++a) {
    out.summary.algorithms.push_back(summarize_algorithm(
        algorithm_name(config.algorithms[static_cast<size_t>(a)]),
        out.records[static_cast<size_t>(a)], out.benchmark.optimum.x,
        out.options.max_iterations));
  }
  return out;
}

std::string summary_to_json(const ExperimentSummary& summary) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["benchmark"] = summary.benchmark;
  j["guess_quality"] = summary.guess_quality;
  j["rng_seed"] = summary.rng_seed;
  j["trials_per_cell"] = summary.trials_per_cell;
  j["max_iterations"] = summary.max_iterations;
  j["initial_guess_sampling"] =
      "per-variable independent uniform, resampled until the start is "
      "usable by every algorithm";
  j["mean_iterations_convention"] = "successful trials only";
  j["algorithms"] = nlohmann::ordered_json::array();
  for (const AlgorithmSummary& a : summary.algorithms) {
    nlohmann::ordered_json ja;
    ja["algorithm"] = a.algorithm;
    ja["trials"] = a.trials;
    ja["successes"] = a.successes;
    ja["failures"] = a.failures;
    ja["failure_rate"] = a.failure_rate;
    if (a.mean_iterations) {
      ja["mean_iterations"] = *a.mean_iterations;
    } else {
      ja["mean_iterations"] = nullptr;
    }
    if (a.best_objective) {
      ja["best_objective"] = *a.best_objective;
      ja["mean_rel_obj_error"] = *a.mean_rel_obj_error;
    } else {
      ja["best_objective"] = nullptr;
      ja["mean_rel_obj_error"] = nullptr;
    }
    ja["outcome_counts"] = a.outcome_counts;
    ja["mean_rel_variable_error"] = a.mean_rel_variable_error;
    ja["convergence_curve"] = a.convergence_curve;
    j["algorithms"].push_back(std::move(ja));
  }
  return j.dump(2);
}

std::string records_to_csv(
    const std::string& benchmark,
    const std::vector<std::vector<TrialRecord>>& records) {
  std::ostringstream csv;
  csv << "# schema_version: 1\n";
  csv << "benchmark,algorithm,trial,seed,outcome,iterations,f_final,"
         "rel_obj_error,wall_ms\n";
  csv.precision(17);
  for (const auto& per_algorithm : records) {
    for (const TrialRecord& rec : per_algorithm) {
      csv << benchmark << ',' << algorithm_name(rec.algorithm) << ','
          << rec.trial_index << ',' << rec.seed << ','
          << bench::outcome_name(rec.outcome) << ',' << rec.iterations << ','
          << rec.f_final << ',' << rec.rel_obj_error << ',' << rec.wall_ms
          << '\n';
    }
  }
  return csv.str();
}

std::string curves_to_csv(const ExperimentSummary& summary) {
  std::ostringstream csv;
  csv << "# schema_version: 1\n";
  csv << "algorithm,k,p_converged\n";
  csv.precision(17);
  for (const AlgorithmSummary& a : summary.algorithms) {
    for (size_t k = 0; k < a.convergence_curve.size(); ++k) {
      csv << a.algorithm << ',' << (k + 1) << ',' << a.convergence_curve[k]
          << '\n';
    }
  }
  return csv.str();
}

}  // namespace lsqp::harness
