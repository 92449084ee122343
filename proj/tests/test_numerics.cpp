#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "bagnet/numerics.hpp"
#include "bagnet/rng.hpp"

using bagnet::exact_mean;
using bagnet::exact_sum;
using bagnet::Rng;

TEST_CASE("exact_sum recovers cancelled terms") {
  const std::vector<double> xs{1e100, 1.0, -1e100};
  CHECK(exact_sum(xs) == 1.0);
  CHECK(exact_sum(std::vector<double>{}) == 0.0);
  CHECK(exact_sum(std::vector<double>{0.1}) == 0.1);
}

TEST_CASE("exact_sum is permutation invariant") {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(40);
    for (auto& x : xs) x = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform_int(-8, 8));
    const double reference = exact_sum(xs);
    for (int p = 0; p < 5; ++p) {
      rng.shuffle(xs);
      CHECK(exact_sum(xs) == reference);
    }
  }
}

TEST_CASE("doubling every input doubles the exact sum") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(17);
    for (auto& x : xs) x = rng.uniform(0.0, 1.0);
    std::vector<double> doubled = xs;
    doubled.insert(doubled.end(), xs.begin(), xs.end());
    rng.shuffle(doubled);
    CHECK(exact_sum(doubled) == 2.0 * exact_sum(xs));
  }
}

TEST_CASE("exact_mean stays within the data range") {
  // 3x/3 can round above x with naive summation; the mean must not.
  const std::vector<double> xs{0.1, 0.1, 0.1};
  CHECK(exact_mean(xs) == 0.1);

  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs2(1 + rng.uniform_index(9));
    for (auto& x : xs2) x = rng.uniform(0.0, 1.0);
    const double m = exact_mean(xs2);
    CHECK(m >= *std::min_element(xs2.begin(), xs2.end()));
    CHECK(m <= *std::max_element(xs2.begin(), xs2.end()));
  }
}

TEST_CASE("duplicating inputs leaves the exact mean unchanged") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(1 + rng.uniform_index(7));
    for (auto& x : xs) x = rng.uniform(0.0, 1.0);
    std::vector<double> doubled = xs;
    doubled.insert(doubled.end(), xs.begin(), xs.end());
    CHECK(exact_mean(doubled) == exact_mean(xs));
  }
}
