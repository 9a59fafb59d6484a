#include "nnrw/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "nnrw/data.hpp"
#include "nnrw/errors.hpp"
#include "nnrw/experiment.hpp"
#include "nnrw/fetch.hpp"
#include "nnrw/model_io.hpp"
#include "nnrw/network.hpp"
#include "nnrw/rng.hpp"

namespace nnrw {

namespace {

struct CommonFlags {
  std::string dataset;
  std::string data_dir;
};

struct TrainFlags {
  std::size_t hidden = 500;
  std::string activations = "sigmoid+gaussian";
  double lambda = kDefaultLambda;
  std::string solver = "ridge";
  std::uint64_t seed = 0;
  std::string init;
  std::string image;
  std::string targets = "01";
  std::string model_out;
};

struct EvalFlags {
  std::string model;
  std::string split = "test";
  std::optional<std::uint64_t> seed;
};

struct SweepFlags {
  std::string hidden;
  std::string activations = "sigmoid+gaussian,sigmoid,gaussian";
  std::size_t trials = 25;
  std::uint64_t seed = 0;
  double lambda = kDefaultLambda;
  std::string solver = "ridge";
  std::string init;
  std::string image;
  std::string targets = "01";
  std::string out;
  std::string json;
  std::string trials_out;
  std::size_t threads = 0;
};

struct MacFlags {
  long long n = 0, m = 0, a = 0, p = 0;
};

struct FetchFlags {
  std::string manifest;
  bool force = false;
};

std::filesystem::path data_dir_of(const CommonFlags& common) {
  if (common.data_dir.empty()) return resolve_data_dir(std::nullopt);
  return resolve_data_dir(std::filesystem::path(common.data_dir));
}

void apply_geometry(NetworkConfig& cfg, const BenchmarkData& data, const std::string& image) {
  if (!image.empty()) {
    const auto x = image.find('x');
    std::size_t h = 0, w = 0;
    try {
      if (x == std::string::npos) throw std::invalid_argument("no x");
      h = std::stoul(image.substr(0, x));
      w = std::stoul(image.substr(x + 1));
    } catch (const std::exception&) {
      throw ConfigError("--image: expected HxW, got '" + image + "'");
    }
    cfg.image_height = h;
    cfg.image_width = w;
    return;
  }
  if (data.image_height != 0) {
    cfg.image_height = data.image_height;
    cfg.image_width = data.image_width;
    return;
  }
  // Non-image benchmarks under shaped init: treat a square input as an image.
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cfg.n_inputs))));
  if (side * side == cfg.n_inputs) cfg.image_height = cfg.image_width = side;
}

void print_warnings(const NetworkConfig& cfg, std::ostream& err) {
  for (const std::string& w : validate(cfg)) err << "warning: " << w << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file " + path);
  return out;
}

int cmd_train(const CommonFlags& common, const TrainFlags& f, std::ostream& out, std::ostream& err) {
  const Benchmark benchmark = parse_benchmark(common.dataset);
  const ActivationSet acts = ActivationSet::parse(f.activations);
  TrialOptions options;
  options.solver = parse_solver(f.solver);
  options.targets = parse_target_coding(f.targets);
  const InitScheme init = f.init.empty() ? InitScheme::Uniform : parse_init_scheme(f.init);
  if (f.hidden == 0) throw ConfigError("--hidden must be positive");
  if (!std::isfinite(f.lambda) || f.lambda < 0.0) throw ConfigError("--lambda must be a finite non-negative number");

  const BenchmarkData data = load_benchmark(benchmark, data_dir_of(common));
  NetworkConfig cfg;
  cfg.n_inputs = data.n_features();
  cfg.n_hidden = f.hidden;
  cfg.activations = acts;
  cfg.lambda = f.lambda;
  cfg.init = f.init.empty() ? data.default_init : init;
  cfg.seed = f.seed;
  apply_geometry(cfg, data, f.image);
  print_warnings(cfg, err);

  const auto [train, test] = trial_datasets(data, f.seed);
  const Network net = train_network(cfg, *train, options);
  const TrialResult r = evaluate(net, *test);
  if (!f.model_out.empty()) save_model(net, f.model_out);

  out << "dataset=" << common.dataset << " M=" << cfg.n_hidden << " activations=" << acts.name()
      << " solver=" << f.solver << " lambda=" << format_double(cfg.lambda) << " seed=" << cfg.seed << '\n';
  out << "accuracy=" << format_double(r.accuracy) << '\n';
  out << "macs=" << r.macs << '\n';
  return kExitOk;
}

int cmd_eval(const CommonFlags& common, const EvalFlags& f, std::ostream& out) {
  const Benchmark benchmark = parse_benchmark(common.dataset);
  if (f.split != "test" && f.split != "train") throw ConfigError("--split must be test or train");
  const Network net = load_model(f.model);
  const BenchmarkData data = load_benchmark(benchmark, data_dir_of(common));
  if (data.n_features() != net.config().n_inputs)
    throw ContractError("dimension mismatch: model expects " + std::to_string(net.config().n_inputs) +
                        " inputs but " + common.dataset + " has " + std::to_string(data.n_features()));
  const auto [train, test] = trial_datasets(data, f.seed.value_or(net.config().seed));
  const TrialResult r = evaluate(net, f.split == "test" ? *test : *train);
  out << "accuracy=" << format_double(r.accuracy) << '\n';
  return kExitOk;
}

int cmd_sweep(const CommonFlags& common, const SweepFlags& f, std::ostream& out, std::ostream& err) {
  const Benchmark benchmark = parse_benchmark(common.dataset);
  if (f.trials == 0) throw ConfigError("--trials must be positive");
  SweepPlan plan;
  plan.hidden_grid = f.hidden.empty() ? default_grid(benchmark) : parse_hidden_grid(f.hidden);
  plan.activation_sets = parse_activation_sets(f.activations);
  plan.n_trials = f.trials;
  plan.base_seed = f.seed;
  if (!std::isfinite(f.lambda) || f.lambda < 0.0) throw ConfigError("--lambda must be a finite non-negative number");
  plan.lambda = f.lambda;
  plan.options.solver = parse_solver(f.solver);
  plan.options.targets = parse_target_coding(f.targets);
  if (!f.init.empty()) plan.init = parse_init_scheme(f.init);
  plan.threads = f.threads != 0 ? f.threads : std::max(1u, std::thread::hardware_concurrency());

  const BenchmarkData data = load_benchmark(benchmark, data_dir_of(common));
  for (const ActivationSet& acts : plan.activation_sets) {
    NetworkConfig cfg;
    cfg.n_inputs = data.n_features();
    cfg.n_hidden = plan.hidden_grid.front();
    cfg.activations = acts;
    cfg.lambda = plan.lambda;
    cfg.init = plan.init.value_or(data.default_init);
    apply_geometry(cfg, data, f.image);
    print_warnings(cfg, err);
  }

  const SweepResult result = run_sweep(plan, data);
  if (f.out.empty()) {
    write_sweep_csv(result, out);
  } else {
    auto file = open_output(f.out);
    write_sweep_csv(result, file);
  }
  if (!f.trials_out.empty()) {
    auto file = open_output(f.trials_out);
    write_trials_csv(result, file);
  }
  if (!f.json.empty()) {
    auto file = open_output(f.json);
    write_sweep_json(result, file);
  }
  const SweepRow& best = result.best();
  out << "best: dataset=" << best.dataset << " M=" << best.n_hidden << " activations=" << best.activations.name()
      << " mean_acc=" << format_double(best.mean_accuracy) << " std_acc=" << format_double(best.std_accuracy)
      << " macs=" << best.macs << '\n';
  return kExitOk;
}

int cmd_mac(const MacFlags& f, std::ostream& out) {
  if (f.n <= 0 || f.m <= 0 || f.a <= 0 || f.p <= 0) throw ConfigError("-N, -M, -A and -P must be positive integers");
  out << mac_count(static_cast<std::uint64_t>(f.n), static_cast<std::uint64_t>(f.m), static_cast<std::uint64_t>(f.a),
                   static_cast<std::uint64_t>(f.p))
      << '\n';
  return kExitOk;
}

int cmd_fetch(const CommonFlags& common, const FetchFlags& f, std::ostream& out) {
  std::vector<Benchmark> targets;
  if (common.dataset == "all")
    targets = {Benchmark::SatImage, Benchmark::Letter, Benchmark::Mnist};
  else
    targets = {parse_benchmark(common.dataset)};
  const auto manifest = f.manifest.empty() ? default_manifest() : read_manifest(f.manifest);
  for (Benchmark b : targets) fetch_benchmark(b, data_dir_of(common), manifest, out, f.force);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural networks with random weights and multi-activation hidden units", "nnrw"};
  app.require_subcommand(1);

  CommonFlags common;
  TrainFlags train;
  EvalFlags eval;
  SweepFlags sweep;
  MacFlags mac;
  FetchFlags fetch;

  auto add_data_flags = [&](CLI::App* cmd, const char* dataset_help) {
    cmd->add_option("--dataset", common.dataset, dataset_help)->required();
    cmd->add_option("--data-dir", common.data_dir, "Data directory (default: $NNRW_DATA_DIR, then ./data)");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "Train one network and report its test accuracy");
  add_data_flags(train_cmd, "satimage, letter or mnist");
  train_cmd->add_option("--hidden", train.hidden, "Hidden units M")->capture_default_str();
  train_cmd->add_option("--activations", train.activations,
                        "Activations of every unit, joined by + or , (sigmoid, gaussian, leaky_relu)")
      ->capture_default_str();
  train_cmd->add_option("--lambda", train.lambda, "Ridge regularization")->capture_default_str();
  train_cmd->add_option("--solver", train.solver, "ridge or pinv")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Random seed for weights (and the Letter split)")->capture_default_str();
  train_cmd->add_option("--init", train.init, "uniform or shaped (default: shaped for mnist, else uniform)");
  train_cmd->add_option("--image", train.image, "Input image HxW for shaped init");
  train_cmd->add_option("--targets", train.targets, "Target coding: 01 or pm1")->capture_default_str();
  train_cmd->add_option("--model-out", train.model_out, "Write the trained model here");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a dataset split");
  add_data_flags(eval_cmd, "satimage, letter or mnist");
  eval_cmd->add_option("--model", eval.model, "Model file written by train --model-out")->required();
  eval_cmd->add_option("--split", eval.split, "test or train")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Letter split seed (default: the model's seed)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Multi-trial accuracy over a hidden-unit grid");
  add_data_flags(sweep_cmd, "satimage, letter or mnist");
  sweep_cmd->add_option("--hidden", sweep.hidden, "M or start..end:step (default: the dataset's standard grid)");
  sweep_cmd->add_option("--activations", sweep.activations,
                        "Activation sets: + joins activations in a set, , separates sets")
      ->capture_default_str();
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per configuration, seeds seed..seed+trials-1")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "Base seed")->capture_default_str();
  sweep_cmd->add_option("--lambda", sweep.lambda, "Ridge regularization")->capture_default_str();
  sweep_cmd->add_option("--solver", sweep.solver, "ridge or pinv")->capture_default_str();
  sweep_cmd->add_option("--init", sweep.init, "uniform or shaped (default: shaped for mnist, else uniform)");
  sweep_cmd->add_option("--targets", sweep.targets, "Target coding: 01 or pm1")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Summary CSV (default: standard output)");
  sweep_cmd->add_option("--json", sweep.json, "JSON with per-trial detail and timings");
  sweep_cmd->add_option("--trials-out", sweep.trials_out, "Per-trial CSV");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (default: all cores); results do not depend on it");

  CLI::App* mac_cmd = app.add_subcommand("mac", "Inference multiply-accumulates N*M + M*N_A*P");
  mac_cmd->add_option("-N", mac.n, "Inputs")->required();
  mac_cmd->add_option("-M", mac.m, "Hidden units")->required();
  mac_cmd->add_option("-A", mac.a, "Activations per unit")->required();
  mac_cmd->add_option("-P", mac.p, "Classes")->required();

  CLI::App* fetch_cmd = app.add_subcommand("fetch", "Download benchmark files into the data directory");
  add_data_flags(fetch_cmd, "satimage, letter, mnist or all");
  fetch_cmd->add_option("--manifest", fetch.manifest, "JSON manifest overriding the built-in URLs and checksums");
  fetch_cmd->add_flag("--force", fetch.force, "Download even if the files are present");

  std::vector<const char*> argv{"nnrw"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(common, train, out, err);
    if (eval_cmd->parsed()) return cmd_eval(common, eval, out);
    if (sweep_cmd->parsed()) return cmd_sweep(common, sweep, out, err);
    if (mac_cmd->parsed()) return cmd_mac(mac, out);
    if (fetch_cmd->parsed()) return cmd_fetch(common, fetch, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelFormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DatasetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace nnrw
