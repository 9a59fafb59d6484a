#include "nnrw/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "nnrw/errors.hpp"

namespace nnrw {

namespace {

constexpr std::uint8_t kMagic[4] = {'N', 'N', 'R', 'W'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const noexcept { return in_.size() - pos_; }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (remaining() < n)
      throw ModelFormatError(ModelFormatError::Reason::Truncated,
                             std::string("bad model file: truncated while reading ") + what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return take(1, what)[0]; }
  std::uint32_t u32(const char* what) {
    auto s = take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | s[static_cast<std::size_t>(i)];
    return v;
  }
  std::uint64_t u64(const char* what) {
    auto s = take(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | s[static_cast<std::size_t>(i)];
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

[[noreturn]] void malformed(const std::string& what) {
  throw ModelFormatError(ModelFormatError::Reason::Malformed, "bad model file: " + what);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw ContractError(std::string("model too large for the file format: ") + what);
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Network& net) {
  const NetworkConfig& cfg = net.config();
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  w.u32(checked_u32(cfg.n_inputs, "N"));
  w.u32(checked_u32(cfg.n_hidden, "M"));
  w.u32(checked_u32(cfg.activations.size(), "N_A"));
  w.u32(checked_u32(net.n_classes(), "P"));
  for (ActivationKind kind : cfg.activations.kinds()) w.u8(static_cast<std::uint8_t>(kind));
  w.u8(static_cast<std::uint8_t>(cfg.init));
  w.u64(cfg.seed);
  w.f64(cfg.lambda);

  const Matrix& a = net.hidden().weights();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) w.f64(a(i, j));
  const Vector& b = net.hidden().bias();
  for (Eigen::Index i = 0; i < b.size(); ++i) w.f64(b(i));
  const Matrix& beta = net.output().beta();
  for (Eigen::Index p = 0; p < beta.cols(); ++p)
    for (Eigen::Index f = 0; f < beta.rows(); ++f) w.f64(beta(f, p));
  return w.take();
}

Network deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(sizeof kMagic, "magic");
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0)
    throw ModelFormatError(ModelFormatError::Reason::BadMagic, "bad model file: missing NNRW magic");
  const std::uint32_t version = r.u32("version");
  if (version != kModelFormatVersion)
    throw ModelFormatError(ModelFormatError::Reason::BadVersion,
                           "bad model file: unsupported format version " + std::to_string(version));

  const std::uint64_t n = r.u32("N"), m = r.u32("M"), n_acts = r.u32("N_A"), p = r.u32("P");
  if (n == 0 || m == 0 || n_acts == 0 || p == 0) malformed("zero dimension in header");

  std::vector<ActivationKind> kinds;
  auto ids = r.take(n_acts, "activation ids");
  for (std::uint8_t id : ids) {
    auto kind = activation_from_id(id);
    if (!kind) malformed("unknown activation id " + std::to_string(id));
    kinds.push_back(*kind);
  }
  const std::uint8_t scheme = r.u8("init scheme");
  if (scheme > static_cast<std::uint8_t>(InitScheme::Shaped)) malformed("unknown init scheme " + std::to_string(scheme));

  NetworkConfig cfg;
  cfg.n_inputs = n;
  cfg.n_hidden = m;
  cfg.activations = ActivationSet(std::move(kinds));
  cfg.init = static_cast<InitScheme>(scheme);
  cfg.seed = r.u64("seed");
  cfg.lambda = r.f64("lambda");
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0) malformed("lambda is not a finite non-negative number");

  // 32-bit dimensions keep every product below 2^128; check before allocating.
  const unsigned __int128 values = static_cast<unsigned __int128>(m) * n + m +
                                   static_cast<unsigned __int128>(m) * n_acts * p;
  const unsigned __int128 needed = values * 8;
  if (needed > r.remaining())
    throw ModelFormatError(ModelFormatError::Reason::Truncated, "bad model file: truncated weight payload");
  if (needed < r.remaining()) malformed("trailing bytes after output weights");

  Matrix a(m, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = r.f64("A");
  Vector b(m);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = r.f64("b");
  Matrix beta(m * n_acts, p);
  for (Eigen::Index c = 0; c < beta.cols(); ++c)
    for (Eigen::Index f = 0; f < beta.rows(); ++f) beta(f, c) = r.f64("beta");

  try {
    return Network(std::move(cfg), HiddenLayerParams(std::move(a), std::move(b)), OutputWeights(std::move(beta)));
  } catch (const DomainError& e) {
    malformed(e.what());
  }
}

void save_model(const Network& net, const std::filesystem::path& path) {
  const auto bytes = serialize_model(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFormatError(ModelFormatError::Reason::Io, "cannot write model file " + path.string());
}

Network load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError(ModelFormatError::Reason::Io, "cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_model(bytes);
}

}  // namespace nnrw
