#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nnrw/network.hpp"
#include "nnrw/types.hpp"

namespace nnrw {

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

/// Samples as rows of X with class indices in [0, n_classes).
struct Dataset {
  Matrix X;
  std::vector<int> y;
  std::size_t n_classes = 0;
  /// Per-feature training range used by normalize(); empty if never normalized.
  std::vector<FeatureRange> feature_meta;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(X.cols()); }

  /// Throws DatasetError unless shapes agree, values are finite and labels are in range.
  void validate() const;
};

struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

/// Rows of a Statlog table before labels are remapped.
struct StatlogTable {
  Matrix X;
  std::vector<long> raw_labels;
};

/// Whitespace-separated integers, `n_attributes` features then the class per line.
StatlogTable parse_statlog(std::istream& in, std::size_t n_attributes);
StatlogTable parse_statlog(const std::filesystem::path& path, std::size_t n_attributes);

/// Sorted distinct labels; position in the result is the contiguous class index.
std::vector<long> label_set(std::span<const long> raw_labels);

/// Loads sat.trn / sat.tst, remaps labels {1,2,3,4,5,7} to 0..5 and checks
/// 4,435 / 2,000 samples with 36 attributes and 6 classes.
std::pair<Dataset, Dataset> load_satimage(const std::filesystem::path& train_path,
                                          const std::filesystem::path& test_path);

/// `T,2,8,3,...` lines: capital letter class then 16 integer features in [0, 15].
Dataset parse_letter(std::istream& in);
/// parse_letter plus a check for 20,000 samples.
Dataset load_letter(const std::filesystem::path& path);

/// IDX image and label files, optionally gzip-compressed. Pixels are scaled by 1/255.
Dataset load_mnist_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Seeded uniform permutation; the first train_count samples train, the next test_count test.
std::pair<Dataset, Dataset> random_split(const Dataset& data, const SplitSpec& spec);

/// Per-feature affine map from the training min/max onto [0, 1], applied to
/// both sets. Features constant on the training set map to 0.
std::pair<Dataset, Dataset> normalize(const Dataset& train, const Dataset& test);

/// L x P target matrix: `positive` at column y[l], `negative` elsewhere.
Matrix one_hot(std::span<const int> labels, std::size_t n_classes, double positive = 1.0, double negative = 0.0);

std::vector<std::size_t> class_histogram(const Dataset& data);

/// Canonical text form: header `nnrw-dataset,N=<n>,P=<p>` then `label,x0,...` rows
/// with shortest round-trip decimals, so reading back gives identical values.
void write_dataset_csv(const Dataset& data, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

/// Reads a whole file, transparently inflating gzip content.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

enum class Benchmark { SatImage, Letter, Mnist };

std::string_view to_string(Benchmark benchmark) noexcept;
Benchmark parse_benchmark(std::string_view name);

/// `--data-dir` if given, else $NNRW_DATA_DIR, else ./data.
std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& flag);

/// A benchmark ready for trials. Fixed-split benchmarks hold normalized train
/// and test sets; Letter keeps the raw pool and is re-split for every trial.
struct BenchmarkData {
  Benchmark benchmark = Benchmark::SatImage;
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const Dataset> test;
  std::shared_ptr<const Dataset> pool;
  std::optional<SplitSpec> resplit;
  bool normalize_features = true;
  InitScheme default_init = InitScheme::Uniform;
  std::size_t image_height = 0;
  std::size_t image_width = 0;

  std::size_t n_features() const noexcept;
  std::size_t n_classes() const noexcept;
};

inline constexpr std::size_t kLetterTrainCount = 13333;
inline constexpr std::size_t kLetterTestCount = 6667;

/// Loads the benchmark's files from `data_dir/<name>/` with the standard names.
BenchmarkData load_benchmark(Benchmark benchmark, const std::filesystem::path& data_dir);

/// Train and test sets for one trial; `seed` only matters for re-split benchmarks.
using DatasetPair = std::pair<std::shared_ptr<const Dataset>, std::shared_ptr<const Dataset>>;
DatasetPair trial_datasets(const BenchmarkData& data, std::uint64_t seed);

}  // namespace nnrw
