#include <doctest.h>

#include <bit>
#include <cstring>
#include <limits>
#include <random>

#include "nnrw/errors.hpp"
#include "nnrw/model_io.hpp"
#include "support.hpp"

using namespace nnrw;

namespace {

Network sample_network(ActivationSet acts = {ActivationKind::Sigmoid, ActivationKind::Gaussian}) {
  NetworkConfig cfg;
  cfg.n_inputs = 5;
  cfg.n_hidden = 4;
  cfg.activations = std::move(acts);
  cfg.lambda = 0.25;
  cfg.seed = 0xDEADBEEFCAFEULL;
  auto hidden = init_uniform(cfg);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> dist;
  Matrix beta(cfg.n_features(), 3);
  for (Eigen::Index i = 0; i < beta.size(); ++i) beta.data()[i] = dist(gen);
  return Network(cfg, std::move(hidden), OutputWeights(beta));
}

constexpr std::size_t kHeader = 4 + 4 + 16;

ModelFormatError::Reason reason_of(const std::vector<std::uint8_t>& bytes) {
  try {
    deserialize_model(bytes);
  } catch (const ModelFormatError& e) {
    return e.reason();
  }
  FAIL("model was accepted");
  return ModelFormatError::Reason::Io;
}

void put_f64(std::vector<std::uint8_t>& bytes, std::size_t at, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) bytes[at + i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

}  // namespace

TEST_CASE("layout of the header") {
  const Network net = sample_network();
  const auto bytes = serialize_model(net);
  REQUIRE(bytes.size() == kHeader + 2 + 1 + 8 + 8 + 8 * (4 * 5 + 4 + 8 * 3));
  CHECK(std::memcmp(bytes.data(), "NNRW", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 5);
  CHECK(bytes[12] == 4);
  CHECK(bytes[16] == 2);
  CHECK(bytes[20] == 3);
  CHECK(bytes[24] == 0);
  CHECK(bytes[25] == 1);
  CHECK(bytes[26] == 0);
  CHECK(bytes[27] == 0xFE);  // seed, little-endian
  double a00 = 0;
  std::memcpy(&a00, bytes.data() + 43, 8);
  CHECK(a00 == net.hidden().weights()(0, 0));
}

TEST_CASE("round trip is exact") {
  for (const char* acts : {"sigmoid+gaussian", "leaky_relu", "gaussian+leaky_relu+sigmoid"}) {
    const Network net = sample_network(ActivationSet::parse(acts));
    const auto bytes = serialize_model(net);
    const Network back = deserialize_model(bytes);
    CHECK(back.config().n_inputs == 5);
    CHECK(back.config().activations == net.config().activations);
    CHECK(back.config().seed == net.config().seed);
    CHECK(back.config().lambda == net.config().lambda);
    CHECK(back.hidden().weights() == net.hidden().weights());
    CHECK(back.hidden().bias() == net.hidden().bias());
    CHECK(back.output().beta() == net.output().beta());
    CHECK(serialize_model(back) == bytes);
  }

  testing::TempDir dir;
  const Network net = sample_network();
  save_model(net, dir / "m.nnrw");
  CHECK(serialize_model(load_model(dir / "m.nnrw")) == serialize_model(net));
  CHECK_THROWS_AS(load_model(dir / "absent.nnrw"), ModelFormatError);
  CHECK_THROWS_AS(save_model(net, dir.path() / "no" / "such" / "dir" / "m"), ModelFormatError);
}

TEST_CASE("structural corruption is rejected with a reason") {
  const auto good = serialize_model(sample_network());
  using R = ModelFormatError::Reason;

  for (std::size_t len = 0; len < good.size(); ++len) {
    const std::vector<std::uint8_t> cut(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(len));
    const R r = reason_of(cut);
    CHECK((r == R::Truncated || (len >= 4 && r == R::Malformed)));
  }

  auto bad = good;
  bad[0] = 'X';
  CHECK(reason_of(bad) == R::BadMagic);
  bad = good;
  bad[4] = 2;
  CHECK(reason_of(bad) == R::BadVersion);
  bad = good;
  bad.push_back(0);
  CHECK(reason_of(bad) == R::Malformed);
  bad = good;
  bad[24] = 3;
  CHECK(reason_of(bad) == R::Malformed);
  bad = good;
  bad[26] = 2;
  CHECK(reason_of(bad) == R::Malformed);
  bad = good;
  put_f64(bad, 35, -1.0);
  CHECK(reason_of(bad) == R::Malformed);
  bad = good;
  put_f64(bad, 35, std::numeric_limits<double>::quiet_NaN());
  CHECK(reason_of(bad) == R::Malformed);
  bad = good;
  put_f64(bad, 43 + 8 * 2, std::numeric_limits<double>::infinity());
  CHECK(reason_of(bad) == R::Malformed);
  for (std::size_t field : {8u, 12u, 16u, 20u}) {
    bad = good;
    std::memset(bad.data() + field, 0, 4);
    CHECK(reason_of(bad) == R::Malformed);
    for (int bit = 0; bit < 32; ++bit) {
      bad = good;
      bad[field + bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      const R r = reason_of(bad);
      CHECK((r == R::Truncated || r == R::Malformed));
    }
  }
  bad = good;
  bad[20] = 0xFF;
  bad[21] = 0xFF;
  bad[22] = 0xFF;
  bad[23] = 0xFF;
  CHECK(reason_of(bad) == R::Truncated);
}

TEST_CASE("random corruption never escapes as anything but a format error") {
  const auto good = serialize_model(sample_network());
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> pos(0, good.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  int rejected = 0;
  for (int rep = 0; rep < 3000; ++rep) {
    auto bad = good;
    const int flips = 1 + rep % 4;
    for (int f = 0; f < flips; ++f) bad[pos(gen)] = static_cast<std::uint8_t>(byte(gen));
    try {
      const Network net = deserialize_model(bad);
      CHECK(net.hidden().weights().allFinite());
      CHECK(net.output().beta().allFinite());
    } catch (const ModelFormatError&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);
}
