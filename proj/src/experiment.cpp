#include "nnrw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include <json.hpp>

#include "nnrw/errors.hpp"
#include "nnrw/rng.hpp"

namespace nnrw {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

kernels::ConstMatrixView row_block(const Matrix& m, std::size_t first, std::size_t count) {
  return {m.data() + first * static_cast<std::size_t>(m.cols()), count, static_cast<std::size_t>(m.cols()),
          static_cast<std::ptrdiff_t>(m.cols()), 1};
}

void check_compatible(const NetworkConfig& config, const Dataset& data, const char* which) {
  if (data.n_features() != config.n_inputs)
    throw ContractError(std::string(which) + " set has " + std::to_string(data.n_features()) +
                        " features but the network expects " + std::to_string(config.n_inputs));
  if (data.size() == 0) throw ContractError(std::string(which) + " set is empty");
}

// Rethrows the active exception as the same category with `context` prepended.
[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const ModelFormatError& e) {
    throw ModelFormatError(e.reason(), context + e.what());
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const ContractError& e) {
    throw ContractError(context + e.what());
  } catch (const DomainError& e) {
    throw DomainError(context + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + e.what());
  } catch (const DatasetError& e) {
    throw DatasetError(context + e.what());
  } catch (const std::overflow_error& e) {
    throw std::overflow_error(context + e.what());
  } catch (const std::bad_alloc&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(context + e.what());
  }
}

}  // namespace

TargetCoding parse_target_coding(std::string_view name) {
  if (name == "01") return {1.0, 0.0};
  if (name == "pm1") return {1.0, -1.0};
  throw ConfigError("unknown target coding '" + std::string(name) + "' (expected 01 or pm1)");
}

Network train_network(const NetworkConfig& config, const Dataset& train, const TrialOptions& options,
                      double* solve_time_ms) {
  validate(config);
  check_compatible(config, train, "training");
  if (options.chunk_rows == 0) throw ConfigError("chunk_rows must be positive");
  HiddenLayerParams hidden = init_hidden(config);

  if (options.solver == SolverKind::Pinv) {
    const Matrix design = build_design_matrix(hidden, config.activations, train.X);
    const Matrix targets = one_hot(train.y, train.n_classes, options.targets.positive, options.targets.negative);
    const auto start = Clock::now();
    OutputWeights beta = pinv_solve(design, targets);
    if (solve_time_ms) *solve_time_ms = elapsed_ms(start);
    return Network(config, std::move(hidden), std::move(beta));
  }

  NormalEquations normal(config.n_features(), train.n_classes);
  Matrix features;
  for (std::size_t first = 0; first < train.size(); first += options.chunk_rows) {
    const std::size_t count = std::min(options.chunk_rows, train.size() - first);
    hidden_features_batch(hidden, config.activations, row_block(train.X, first, count), features);
    const Matrix targets = one_hot(std::span<const int>(train.y).subspan(first, count), train.n_classes,
                                   options.targets.positive, options.targets.negative);
    normal.add(kernels::view(features), kernels::view(targets));
  }
  const auto start = Clock::now();
  OutputWeights beta = normal.solve(config.lambda);
  if (solve_time_ms) *solve_time_ms = elapsed_ms(start);
  return Network(config, std::move(hidden), std::move(beta));
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw ContractError("accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw ContractError("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

TrialResult evaluate(const Network& net, const Dataset& test) {
  check_compatible(net.config(), test, "test");
  if (test.n_classes != net.n_classes())
    throw ContractError("test set has " + std::to_string(test.n_classes) + " classes but the network scores " +
                        std::to_string(net.n_classes()));
  const std::vector<int> predicted = predict_batch(net, test.X);
  const NetworkConfig& cfg = net.config();
  TrialResult r;
  r.seed = cfg.seed;
  r.n_hidden = cfg.n_hidden;
  r.activations = cfg.activations;
  r.lambda = cfg.lambda;
  r.total = test.size();
  for (std::size_t i = 0; i < test.size(); ++i) r.correct += predicted[i] == test.y[i];
  r.accuracy = accuracy(predicted, test.y);
  r.macs = mac_count(cfg.n_inputs, cfg.n_hidden, cfg.activations.size(), net.n_classes());
  return r;
}

TrialResult run_trial(const NetworkConfig& config, const Dataset& train, const Dataset& test,
                      const TrialOptions& options) {
  check_compatible(config, test, "test");
  if (train.n_classes != test.n_classes) throw ContractError("training and test sets disagree on the class count");

  const auto start = Clock::now();
  double solve_ms = 0.0;
  const Network net = train_network(config, train, options, &solve_ms);
  const double train_ms = elapsed_ms(start);

  TrialResult r = evaluate(net, test);
  r.solver = options.solver;
  r.train_time_ms = train_ms;
  r.solve_time_ms = solve_ms;
  return r;
}

const SweepRow& SweepResult::best() const {
  if (rows.empty()) throw ContractError("sweep has no rows");
  const SweepRow* best = &rows.front();
  for (const SweepRow& row : rows)
    if (row.mean_accuracy > best->mean_accuracy) best = &row;
  return *best;
}

void aggregate(SweepRow& row) {
  row.n_trials = row.trials.size();
  if (row.trials.empty()) throw ContractError("cannot aggregate zero trials");
  const double n = static_cast<double>(row.trials.size());
  double sum = 0.0;
  for (const TrialResult& t : row.trials) sum += t.accuracy;
  row.mean_accuracy = sum / n;
  double sq = 0.0;
  for (const TrialResult& t : row.trials) sq += (t.accuracy - row.mean_accuracy) * (t.accuracy - row.mean_accuracy);
  row.std_accuracy = std::sqrt(sq / n);
}

SweepResult run_sweep(const SweepPlan& plan, const BenchmarkData& data) {
  if (plan.hidden_grid.empty()) throw ConfigError("hidden-unit grid is empty");
  if (plan.activation_sets.empty()) throw ConfigError("no activation sets given");
  if (plan.n_trials == 0) throw ConfigError("trials must be positive");

  const std::size_t n_sets = plan.activation_sets.size();
  const std::size_t n_grid = plan.hidden_grid.size();
  const std::size_t n_trials = plan.n_trials;

  // Splits depend on the trial only, so every configuration sees the same partitions.
  std::vector<DatasetPair> splits;
  splits.reserve(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) splits.push_back(trial_datasets(data, trial_seed(plan.base_seed, t)));

  auto config_for = [&](std::size_t set, std::size_t m, std::size_t t) {
    NetworkConfig cfg;
    cfg.n_inputs = data.n_features();
    cfg.n_hidden = plan.hidden_grid[m];
    cfg.activations = plan.activation_sets[set];
    cfg.lambda = plan.lambda;
    cfg.init = plan.init.value_or(data.default_init);
    cfg.image_height = data.image_height;
    cfg.image_width = data.image_width;
    cfg.seed = trial_seed(plan.base_seed, t);
    return cfg;
  };
  // Reject bad configurations before any trial starts.
  for (std::size_t s = 0; s < n_sets; ++s)
    for (std::size_t m = 0; m < n_grid; ++m) validate(config_for(s, m, 0));

  const std::size_t n_jobs = n_sets * n_grid * n_trials;
  std::vector<TrialResult> results(n_jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_job = n_jobs;
  std::exception_ptr error;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const std::size_t t = job % n_trials;
      const std::size_t m = (job / n_trials) % n_grid;
      const std::size_t s = job / (n_trials * n_grid);
      try {
        const auto& [train, test] = splits[t];
        results[job] = run_trial(config_for(s, m, t), *train, *test, plan.options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (job < error_job) {
          error_job = job;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(plan.threads, 1, n_jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  if (error) {
    const std::size_t t = error_job % n_trials;
    const std::size_t m = (error_job / n_trials) % n_grid;
    const std::size_t s = error_job / (n_trials * n_grid);
    rethrow_with_context(error, "sweep failed at dataset=" + std::string(to_string(data.benchmark)) +
                                    " M=" + std::to_string(plan.hidden_grid[m]) + " activations=" +
                                    plan.activation_sets[s].name() + " trial=" + std::to_string(t) + ": ");
  }

  SweepResult out;
  for (std::size_t s = 0; s < n_sets; ++s) {
    for (std::size_t m = 0; m < n_grid; ++m) {
      SweepRow row;
      row.dataset = std::string(to_string(data.benchmark));
      row.n_hidden = plan.hidden_grid[m];
      row.activations = plan.activation_sets[s];
      row.solver = plan.options.solver;
      row.lambda = plan.lambda;
      row.macs = mac_count(data.n_features(), row.n_hidden, row.activations.size(), data.n_classes());
      const std::size_t first = (s * n_grid + m) * n_trials;
      row.trials.assign(results.begin() + static_cast<std::ptrdiff_t>(first),
                        results.begin() + static_cast<std::ptrdiff_t>(first + n_trials));
      aggregate(row);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "dataset,M,n_activations,activations,solver,lambda,trials,mean_acc,std_acc,macs\n";
  for (const SweepRow& row : result.rows) {
    out << row.dataset << ',' << row.n_hidden << ',' << row.activations.size() << ',' << row.activations.name()
        << ',' << to_string(row.solver) << ',' << format_double(row.lambda) << ',' << row.n_trials << ','
        << format_double(row.mean_accuracy) << ',' << format_double(row.std_accuracy) << ',' << row.macs << '\n';
  }
}

void write_trials_csv(const SweepResult& result, std::ostream& out) {
  out << "dataset,M,activations,solver,lambda,trial,seed,accuracy,correct,total,macs\n";
  for (const SweepRow& row : result.rows) {
    for (std::size_t t = 0; t < row.trials.size(); ++t) {
      const TrialResult& r = row.trials[t];
      out << row.dataset << ',' << r.n_hidden << ',' << r.activations.name() << ',' << to_string(r.solver) << ','
          << format_double(r.lambda) << ',' << t << ',' << r.seed << ',' << format_double(r.accuracy) << ','
          << r.correct << ',' << r.total << ',' << r.macs << '\n';
    }
  }
}

void write_sweep_json(const SweepResult& result, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : result.rows) {
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialResult& r : row.trials) {
      trials.push_back({{"seed", r.seed},
                        {"accuracy", r.accuracy},
                        {"correct", r.correct},
                        {"total", r.total},
                        {"train_time_ms", r.train_time_ms},
                        {"solve_time_ms", r.solve_time_ms},
                        {"macs", r.macs}});
    }
    rows.push_back({{"dataset", row.dataset},
                    {"M", row.n_hidden},
                    {"n_activations", row.activations.size()},
                    {"activations", row.activations.name()},
                    {"solver", std::string(to_string(row.solver))},
                    {"lambda", row.lambda},
                    {"trials", row.n_trials},
                    {"mean_acc", row.mean_accuracy},
                    {"std_acc", row.std_accuracy},
                    {"macs", row.macs},
                    {"per_trial", std::move(trials)}});
  }
  out << nlohmann::json{{"rows", std::move(rows)}}.dump(2) << '\n';
}

std::vector<std::size_t> parse_hidden_grid(std::string_view text) {
  auto number = [&](std::string_view part) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v == 0)
      throw ConfigError("--hidden: '" + std::string(part) + "' is not a positive integer");
    return v;
  };
  const std::size_t dots = text.find("..");
  if (dots == std::string_view::npos) return {number(text)};

  const std::size_t colon = text.find(':', dots);
  if (colon == std::string_view::npos) throw ConfigError("--hidden: expected start..end:step, got '" + std::string(text) + "'");
  const std::size_t start = number(text.substr(0, dots));
  const std::size_t end = number(text.substr(dots + 2, colon - dots - 2));
  const std::size_t step = number(text.substr(colon + 1));
  if (end < start) throw ConfigError("--hidden: end is smaller than start in '" + std::string(text) + "'");
  std::vector<std::size_t> grid;
  for (std::size_t m = start; m <= end; m += step) grid.push_back(m);
  return grid;
}

std::vector<std::size_t> default_grid(Benchmark benchmark) {
  switch (benchmark) {
    case Benchmark::SatImage: return parse_hidden_grid("100..1000:100");
    case Benchmark::Letter: return parse_hidden_grid("200..3000:200");
    case Benchmark::Mnist: return parse_hidden_grid("500..7000:500");
  }
  return {};
}

}  // namespace nnrw
