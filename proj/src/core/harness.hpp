#pragma once

#include "core/benchmarks.hpp"
#include "core/engine.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lsqp::harness {

/// Small deterministic RNG (SplitMix64). Each trial gets its own stream so
/// results cannot depend on how trials are scheduled across workers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

 private:
  std::uint64_t state_;
};

/// Seed of trial i's substream, mixed from the experiment seed.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t experiment_seed,
                                       int trial_index);

enum class GuessQuality { Good, Poor };

[[nodiscard]] std::string guess_quality_name(GuessQuality q);

/// Half-width of the sampling box around the optimum: 10% or 80%.
[[nodiscard]] double guess_delta(GuessQuality q);

/// Per-component uniform draw from [x*(1-delta), x*(1+delta)], clamped to
/// the variable floors.
[[nodiscard]] Vector sample_initial_guess(const Vector& optimum,
                                          GuessQuality quality,
                                          SplitMix64& rng,
                                          const Vector& floors);

/// True when every algorithm can start from x0: the evaluation there is
/// finite and strictly positive, so the log transform is defined.
[[nodiscard]] bool usable_common_start(const Problem& problem,
                                       const Vector& x0);

/// Optional per-experiment solver settings; unset fields keep the
/// benchmark's defaults.
struct SolverOverrides {
  std::optional<int> max_iterations;
  std::optional<double> eps_grad_lagrangian;
  std::optional<double> eps_step;
  std::optional<bool> enforce_positivity;
};

[[nodiscard]] SolverOptions merge_options(const SolverOptions& base,
                                          const SolverOverrides& overrides);

struct ExperimentConfig {
  std::string benchmark;
  std::vector<Algorithm> algorithms{Algorithm::Sqp, Algorithm::Lsqp};
  int trials_per_cell{100};
  GuessQuality guess_quality{GuessQuality::Good};
  std::uint64_t rng_seed{0};
  SolverOverrides overrides;
  int worker_count{0};  // 0 picks the hardware concurrency
  std::string benchmark_config_json;
};

struct TrialRecord {
  int trial_index{0};
  std::uint64_t seed{0};  // substream seed, shared across algorithms
  Algorithm algorithm{Algorithm::Sqp};
  Vector x0;
  bench::Outcome outcome{bench::Outcome::LineSearchFailure};
  Termination termination{Termination::MaxIter};
  int iterations{0};
  double f_final{0.0};
  double rel_obj_error{0.0};
  double max_violation{0.0};
  Vector x_final;
  Vector multipliers;
  double wall_ms{0.0};
};

struct AlgorithmSummary {
  std::string algorithm;
  int trials{0};
  int successes{0};
  int failures{0};  // everything that is not a Success
  double failure_rate{0.0};
  // Statistics over successful trials only; unset when nothing succeeded.
  std::optional<double> mean_iterations;
  std::optional<double> best_objective;      // lowest f among successes
  std::optional<double> mean_rel_obj_error;  // mean |f - f*| / |f*|
  std::map<std::string, int> outcome_counts;
  std::vector<double> mean_rel_variable_error;  // over successful trials
  // convergence_curve[k-1] = P[success within k iterations], k = 1..max_iter.
  std::vector<double> convergence_curve;
};

struct ExperimentSummary {
  std::string benchmark;
  std::string guess_quality;
  std::uint64_t rng_seed{0};
  int trials_per_cell{0};
  int max_iterations{0};
  std::vector<AlgorithmSummary> algorithms;
};

struct ExperimentResult {
  bench::BenchmarkCase benchmark;
  SolverOptions options;  // resolved options the trials actually ran with
  // records[a][t] is algorithm a (config order) on trial t.
  std::vector<std::vector<TrialRecord>> records;
  ExperimentSummary summary;
};

/// Runs one solve and classifies it; solver errors are captured in the
/// outcome, never thrown.
[[nodiscard]] TrialRecord run_trial(const bench::BenchmarkCase& c,
                                    Algorithm algorithm, const Vector& x0,
                                    const SolverOptions& options);

/// Runs every requested algorithm on a common set of sampled initial
/// guesses. Deterministic for a fixed seed, independent of worker_count;
/// only the wall_ms fields vary between runs.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config);

/// Summary as JSON with a schema_version field and stable key order.
/// Contains no timing or worker information, so byte-identical reruns are
/// expected.
[[nodiscard]] std::string summary_to_json(const ExperimentSummary& summary);

/// One CSV row per trial: benchmark, algorithm, trial, seed, outcome,
/// iterations, f_final, rel_obj_error, wall_ms.
[[nodiscard]] std::string records_to_csv(
    const std::string& benchmark,
    const std::vector<std::vector<TrialRecord>>& records);

/// Convergence curves as CSV: algorithm, k, p_converged.
[[nodiscard]] std::string curves_to_csv(const ExperimentSummary& summary);

}  // namespace lsqp::harness
