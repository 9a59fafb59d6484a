#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "nnrw/rng.hpp"

using namespace nnrw;

TEST_CASE("engine is the standard mt19937_64") {
  // The standard fixes the 10000th output for the default seed.
  Rng rng(std::mt19937_64::default_seed);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("uniform draws stay in range") {
  Rng rng(3);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double s = rng.uniform_pm1();
    REQUIRE(s >= -1.0);
    REQUIRE(s < 1.0);
    sum += s;
  }
  CHECK(std::abs(sum / n) < 0.01);
}

TEST_CASE("uniform_int covers the closed range evenly") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.uniform_int(3, 9);
    REQUIRE(v >= 3);
    REQUIRE(v <= 9);
    ++counts[v - 3];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(rng.uniform_int(5, 5) == 5);
  CHECK(rng.uniform_int(0, ~std::uint64_t{0}) >= 0);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(1000), b(1000);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Rng r1(5), r2(5);
  r1.shuffle(std::span<int>(a));
  r2.shuffle(std::span<int>(b));
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 1000; ++i) REQUIRE(sorted[i] == i);
  CHECK_FALSE(std::is_sorted(a.begin(), a.end()));
}

TEST_CASE("seed helpers") {
  CHECK(trial_seed(100, 4) == 104);
  CHECK(split_seed(1) != 1);
  CHECK(split_seed(split_seed(42)) == 42);
}
