#pragma once

// Seeded trials, hidden-unit sweeps and result files.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnrw/data.hpp"
#include "nnrw/network.hpp"
#include "nnrw/solver.hpp"

namespace nnrw {

/// Target values for the true class and for every other class.
struct TargetCoding {
  double positive = 1.0;
  double negative = 0.0;
};

/// `01` (default) or `pm1`.
TargetCoding parse_target_coding(std::string_view name);

struct TrialOptions {
  SolverKind solver = SolverKind::Ridge;
  TargetCoding targets;
  /// Training rows featurized at a time when streaming into the normal equations.
  std::size_t chunk_rows = 1024;
};

/// Initializes and trains one network on `train`. If given, `solve_time_ms`
/// receives the time spent solving for the output weights.
Network train_network(const NetworkConfig& config, const Dataset& train, const TrialOptions& options = {},
                      double* solve_time_ms = nullptr);

struct TrialResult {
  std::uint64_t seed = 0;
  std::size_t n_hidden = 0;
  ActivationSet activations;
  SolverKind solver = SolverKind::Ridge;
  double lambda = kDefaultLambda;
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  /// Whole of training: init, features and solve.
  double train_time_ms = 0.0;
  double solve_time_ms = 0.0;
  std::uint64_t macs = 0;
};

/// Fraction of positions where prediction and label agree.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

/// Trains on `train` and scores on `test`.
TrialResult run_trial(const NetworkConfig& config, const Dataset& train, const Dataset& test,
                      const TrialOptions& options = {});

/// Test-set accuracy of an already trained network.
TrialResult evaluate(const Network& net, const Dataset& test);

struct SweepPlan {
  std::vector<std::size_t> hidden_grid;
  std::vector<ActivationSet> activation_sets;
  std::size_t n_trials = 25;
  std::uint64_t base_seed = 0;
  double lambda = kDefaultLambda;
  /// Benchmark default when unset.
  std::optional<InitScheme> init;
  TrialOptions options;
  /// Worker threads; results do not depend on this.
  std::size_t threads = 1;
};

struct SweepRow {
  std::string dataset;
  std::size_t n_hidden = 0;
  ActivationSet activations;
  SolverKind solver = SolverKind::Ridge;
  double lambda = kDefaultLambda;
  std::size_t n_trials = 0;
  double mean_accuracy = 0.0;
  /// Population standard deviation.
  double std_accuracy = 0.0;
  std::uint64_t macs = 0;
  /// Ordered by trial index.
  std::vector<TrialResult> trials;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// Highest mean accuracy; the first such row on ties.
  const SweepRow& best() const;
};

/// Every activation set at every grid point for n_trials seeds base_seed + t.
/// Rows come out ordered by activation set, then by grid position.
SweepResult run_sweep(const SweepPlan& plan, const BenchmarkData& data);

/// mean and population standard deviation of the trial accuracies.
void aggregate(SweepRow& row);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
/// One line per trial, without timings, so reruns compare byte for byte.
void write_trials_csv(const SweepResult& result, std::ostream& out);
/// Rows with per-trial detail including timings.
void write_sweep_json(const SweepResult& result, std::ostream& out);

/// A single value `500` or an inclusive range `start..end:step`.
std::vector<std::size_t> parse_hidden_grid(std::string_view text);

std::vector<std::size_t> default_grid(Benchmark benchmark);

/// Shortest text that reads back as the same double.
std::string format_double(double value);

}  // namespace nnrw
