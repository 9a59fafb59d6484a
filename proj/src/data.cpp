#include "nnrw/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <string>

#include <zlib.h>

#include "nnrw/errors.hpp"
#include "nnrw/rng.hpp"

namespace nnrw {

namespace {

constexpr std::size_t kSatAttributes = 36;
constexpr std::size_t kSatClasses = 6;
constexpr std::size_t kSatTrainCount = 4435;
constexpr std::size_t kSatTestCount = 2000;
constexpr std::size_t kLetterAttributes = 16;
constexpr std::size_t kLetterClasses = 26;
constexpr std::size_t kLetterCount = 20000;
constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kMnistClasses = 10;
constexpr std::size_t kMnistTrainCount = 60000;
constexpr std::size_t kMnistTestCount = 10000;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    fields.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
  throw DatasetError("line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  return in;
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

Dataset take_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.n_classes = data.n_classes;
  out.feature_meta = data.feature_meta;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.X.cols());
  out.y.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = data.X.row(static_cast<Eigen::Index>(rows[r]));
    out.y.push_back(data.y[rows[r]]);
  }
  return out;
}

void expect_count(const std::string& what, std::size_t actual, std::size_t expected) {
  if (actual != expected)
    throw DatasetError(what + ": expected " + std::to_string(expected) + " samples, found " + std::to_string(actual));
}

std::filesystem::path existing_or_gz(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) return path;
  std::filesystem::path gz = path;
  gz += ".gz";
  if (std::filesystem::exists(gz)) return gz;
  throw DatasetError("missing data file " + path.string() + " (or .gz)");
}

}  // namespace

void Dataset::validate() const {
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw DatasetError("dataset has " + std::to_string(X.rows()) + " feature rows but " + std::to_string(y.size()) +
                       " labels");
  if (n_classes == 0) throw DatasetError("dataset has no classes");
  if (!X.allFinite()) throw DatasetError("dataset contains non-finite feature values");
  for (int label : y)
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
      throw DatasetError("label " + std::to_string(label) + " outside [0, " + std::to_string(n_classes) + ")");
}

StatlogTable parse_statlog(std::istream& in, std::size_t n_attributes) {
  std::vector<double> values;
  StatlogTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() != n_attributes + 1)
      line_error(line_no, "expected " + std::to_string(n_attributes + 1) + " fields, found " +
                              std::to_string(tokens.size()));
    for (std::size_t i = 0; i < n_attributes; ++i) {
      long v = 0;
      if (!parse_number(tokens[i], v)) line_error(line_no, "attribute '" + std::string(tokens[i]) + "' is not an integer");
      values.push_back(static_cast<double>(v));
    }
    long label = 0;
    if (!parse_number(tokens.back(), label)) line_error(line_no, "class '" + std::string(tokens.back()) + "' is not an integer");
    table.raw_labels.push_back(label);
  }
  table.X = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(table.raw_labels.size()),
                                     static_cast<Eigen::Index>(n_attributes));
  return table;
}

StatlogTable parse_statlog(const std::filesystem::path& path, std::size_t n_attributes) {
  auto in = open_text(path);
  try {
    return parse_statlog(in, n_attributes);
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

std::vector<long> label_set(std::span<const long> raw_labels) {
  std::set<long> distinct(raw_labels.begin(), raw_labels.end());
  return {distinct.begin(), distinct.end()};
}

std::pair<Dataset, Dataset> load_satimage(const std::filesystem::path& train_path,
                                          const std::filesystem::path& test_path) {
  StatlogTable train = parse_statlog(train_path, kSatAttributes);
  StatlogTable test = parse_statlog(test_path, kSatAttributes);
  expect_count("SatImage training file", train.raw_labels.size(), kSatTrainCount);
  expect_count("SatImage test file", test.raw_labels.size(), kSatTestCount);

  const std::vector<long> labels = label_set(train.raw_labels);
  if (labels.size() != kSatClasses)
    throw DatasetError("SatImage training file: expected 6 classes, found " + std::to_string(labels.size()));

  auto to_dataset = [&](StatlogTable& table, const char* which) {
    Dataset d;
    d.X = std::move(table.X);
    d.n_classes = kSatClasses;
    for (long raw : table.raw_labels) {
      auto it = std::lower_bound(labels.begin(), labels.end(), raw);
      if (it == labels.end() || *it != raw)
        throw DatasetError(std::string("SatImage ") + which + " file: class " + std::to_string(raw) +
                           " does not occur in the training file");
      d.y.push_back(static_cast<int>(it - labels.begin()));
    }
    d.validate();
    return d;
  };
  Dataset train_set = to_dataset(train, "training");
  Dataset test_set = to_dataset(test, "test");
  return {std::move(train_set), std::move(test_set)};
}

Dataset parse_letter(std::istream& in) {
  std::vector<double> values;
  Dataset d;
  d.n_classes = kLetterClasses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto fields = split_on(text, ',');
    if (fields.size() != kLetterAttributes + 1)
      line_error(line_no, "expected 17 comma-separated fields, found " + std::to_string(fields.size()));
    const std::string_view letter = trim(fields[0]);
    if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z')
      line_error(line_no, "class '" + std::string(letter) + "' is not a capital letter");
    for (std::size_t i = 1; i < fields.size(); ++i) {
      int v = 0;
      if (!parse_number(fields[i], v) || v < 0 || v > 15)
        line_error(line_no, "feature '" + std::string(fields[i]) + "' is not an integer in [0, 15]");
      values.push_back(v);
    }
    d.y.push_back(letter[0] - 'A');
  }
  d.X = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(d.y.size()),
                                 static_cast<Eigen::Index>(kLetterAttributes));
  return d;
}

Dataset load_letter(const std::filesystem::path& path) {
  auto in = open_text(path);
  Dataset d;
  try {
    d = parse_letter(in);
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
  expect_count("Letter file", d.size(), kLetterCount);
  return d;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (!file) throw DatasetError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes;
  std::uint8_t buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof buffer)) > 0) bytes.insert(bytes.end(), buffer, buffer + n);
  const bool failed = n < 0;
  gzclose(file);
  if (failed) throw DatasetError("cannot decompress " + path.string());
  return bytes;
}

Dataset load_mnist_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const auto images = read_file_bytes(images_path);
  const auto labels = read_file_bytes(labels_path);

  if (images.size() < 16) throw DatasetError("IDX images " + images_path.string() + ": truncated header");
  if (read_be32(images, 0) != kIdxImageMagic)
    throw DatasetError("IDX images " + images_path.string() + ": wrong magic (expected 2051)");
  if (labels.size() < 8) throw DatasetError("IDX labels " + labels_path.string() + ": truncated header");
  if (read_be32(labels, 0) != kIdxLabelMagic)
    throw DatasetError("IDX labels " + labels_path.string() + ": wrong magic (expected 2049)");

  const std::size_t count = read_be32(images, 4);
  const std::size_t rows = read_be32(images, 8);
  const std::size_t cols = read_be32(images, 12);
  const std::size_t label_count = read_be32(labels, 4);
  if (count != label_count)
    throw DatasetError("IDX count mismatch: " + std::to_string(count) + " images but " + std::to_string(label_count) +
                       " labels");
  const std::size_t pixels = rows * cols;
  if (images.size() - 16 != count * pixels)
    throw DatasetError("IDX images " + images_path.string() + ": truncated payload (" +
                       std::to_string(images.size() - 16) + " bytes for " + std::to_string(count) + " images)");
  if (labels.size() - 8 != count)
    throw DatasetError("IDX labels " + labels_path.string() + ": truncated payload");

  Dataset d;
  d.n_classes = kMnistClasses;
  d.X.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(pixels));
  const std::uint8_t* px = images.data() + 16;
  for (std::size_t i = 0; i < count * pixels; ++i) d.X.data()[i] = px[i] / 255.0;
  d.y.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t label = labels[8 + i];
    if (label >= kMnistClasses) throw DatasetError("IDX labels: label " + std::to_string(label) + " out of range");
    d.y.push_back(label);
  }
  return d;
}

std::pair<Dataset, Dataset> random_split(const Dataset& data, const SplitSpec& spec) {
  if (spec.train_count == 0 || spec.test_count == 0) throw ConfigError("split counts must be positive");
  if (spec.train_count > data.size() || spec.test_count > data.size() - spec.train_count)
    throw ConfigError("split of " + std::to_string(spec.train_count) + " + " + std::to_string(spec.test_count) +
                      " exceeds " + std::to_string(data.size()) + " samples");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));
  const std::span<const std::size_t> all(order);
  return {take_rows(data, all.first(spec.train_count)), take_rows(data, all.subspan(spec.train_count, spec.test_count))};
}

std::pair<Dataset, Dataset> normalize(const Dataset& train, const Dataset& test) {
  if (train.size() == 0) throw ContractError("normalize: empty training set");
  if (train.n_features() != test.n_features()) throw ContractError("normalize: train and test widths differ");
  std::vector<FeatureRange> ranges(train.n_features());
  for (Eigen::Index j = 0; j < train.X.cols(); ++j)
    ranges[static_cast<std::size_t>(j)] = {train.X.col(j).minCoeff(), train.X.col(j).maxCoeff()};

  auto apply = [&](const Dataset& in) {
    Dataset out = in;
    out.feature_meta = ranges;
    for (Eigen::Index j = 0; j < out.X.cols(); ++j) {
      const FeatureRange r = ranges[static_cast<std::size_t>(j)];
      const double width = r.max - r.min;
      for (Eigen::Index i = 0; i < out.X.rows(); ++i)
        out.X(i, j) = width > 0.0 ? (out.X(i, j) - r.min) / width : 0.0;
    }
    return out;
  };
  return {apply(train), apply(test)};
}

Matrix one_hot(std::span<const int> labels, std::size_t n_classes, double positive, double negative) {
  Matrix targets = Matrix::Constant(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(n_classes),
                                    negative);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes)
      throw ContractError("one_hot: label " + std::to_string(labels[i]) + " outside [0, " +
                          std::to_string(n_classes) + ")");
    targets(static_cast<Eigen::Index>(i), labels[i]) = positive;
  }
  return targets;
}

std::vector<std::size_t> class_histogram(const Dataset& data) {
  std::vector<std::size_t> counts(data.n_classes, 0);
  for (int label : data.y) ++counts.at(static_cast<std::size_t>(label));
  return counts;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "nnrw-dataset,N=" << data.n_features() << ",P=" << data.n_classes << '\n';
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.y[i];
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, data.X(static_cast<Eigen::Index>(i), j));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DatasetError("dataset CSV: missing header");
  const auto header = split_on(trim(line), ',');
  std::size_t n = 0, p = 0;
  if (header.size() != 3 || header[0] != "nnrw-dataset" || !header[1].starts_with("N=") ||
      !header[2].starts_with("P=") || !parse_number(header[1].substr(2), n) || !parse_number(header[2].substr(2), p))
    throw DatasetError("dataset CSV: malformed header '" + line + "'");

  Dataset d;
  d.n_classes = p;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_on(trim(line), ',');
    if (fields.size() != n + 1) line_error(line_no, "expected " + std::to_string(n + 1) + " fields");
    int label = 0;
    if (!parse_number(fields[0], label)) line_error(line_no, "bad label");
    d.y.push_back(label);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0;
      if (!parse_number(fields[j], v)) line_error(line_no, "bad value '" + std::string(fields[j]) + "'");
      values.push_back(v);
    }
  }
  d.X = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(d.y.size()), static_cast<Eigen::Index>(n));
  d.validate();
  return d;
}

std::string_view to_string(Benchmark benchmark) noexcept {
  switch (benchmark) {
    case Benchmark::SatImage: return "satimage";
    case Benchmark::Letter: return "letter";
    case Benchmark::Mnist: return "mnist";
  }
  return "unknown";
}

Benchmark parse_benchmark(std::string_view name) {
  for (Benchmark b : {Benchmark::SatImage, Benchmark::Letter, Benchmark::Mnist})
    if (to_string(b) == name) return b;
  throw ConfigError("unknown dataset '" + std::string(name) + "' (expected satimage, letter or mnist)");
}

std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NNRW_DATA_DIR"); env && *env) return env;
  return "data";
}

std::size_t BenchmarkData::n_features() const noexcept {
  return (pool ? pool : train)->n_features();
}

std::size_t BenchmarkData::n_classes() const noexcept {
  return (pool ? pool : train)->n_classes;
}

BenchmarkData load_benchmark(Benchmark benchmark, const std::filesystem::path& data_dir) {
  if (!std::filesystem::is_directory(data_dir))
    throw DatasetError("data directory " + data_dir.string() + " is not readable");
  const std::filesystem::path dir = data_dir / std::string(to_string(benchmark));
  BenchmarkData out;
  out.benchmark = benchmark;

  switch (benchmark) {
    case Benchmark::SatImage: {
      auto [train, test] = load_satimage(dir / "sat.trn", dir / "sat.tst");
      auto [train_n, test_n] = normalize(train, test);
      out.train = std::make_shared<const Dataset>(std::move(train_n));
      out.test = std::make_shared<const Dataset>(std::move(test_n));
      break;
    }
    case Benchmark::Letter:
      out.pool = std::make_shared<const Dataset>(load_letter(dir / "letter-recognition.data"));
      out.resplit = SplitSpec{kLetterTrainCount, kLetterTestCount, 0};
      break;
    case Benchmark::Mnist: {
      Dataset train = load_mnist_idx(existing_or_gz(dir / "train-images-idx3-ubyte"),
                                     existing_or_gz(dir / "train-labels-idx1-ubyte"));
      Dataset test = load_mnist_idx(existing_or_gz(dir / "t10k-images-idx3-ubyte"),
                                    existing_or_gz(dir / "t10k-labels-idx1-ubyte"));
      expect_count("MNIST training files", train.size(), kMnistTrainCount);
      expect_count("MNIST test files", test.size(), kMnistTestCount);
      out.train = std::make_shared<const Dataset>(std::move(train));
      out.test = std::make_shared<const Dataset>(std::move(test));
      out.normalize_features = false;
      out.default_init = InitScheme::Shaped;
      out.image_height = 28;
      out.image_width = 28;
      break;
    }
  }
  return out;
}

DatasetPair trial_datasets(const BenchmarkData& data, std::uint64_t seed) {
  if (!data.resplit) return {data.train, data.test};
  SplitSpec spec = *data.resplit;
  spec.seed = split_seed(seed);
  auto [train, test] = random_split(*data.pool, spec);
  if (data.normalize_features) std::tie(train, test) = normalize(train, test);
  return {std::make_shared<const Dataset>(std::move(train)), std::make_shared<const Dataset>(std::move(test))};
}

}  // namespace nnrw
