#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bbmx/offspring.hpp"

using namespace bbmx;

TEST_CASE("binary law has the expected derived constants") {
  const auto dist = OffspringDistribution::binary();
  CHECK(dist.second_factorial_moment() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dist.probability_of_one() == 0.0);
  CHECK(dist.size_biased_mean() == doctest::Approx(2.0));
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(dist.sample(rng) == 2);
    CHECK(dist.sample_size_biased(rng) == 2);
  }
}

TEST_CASE("mixed law p1 = p3 = 1/2") {
  const OffspringDistribution dist({{1, 0.5}, {3, 0.5}});
  CHECK(dist.second_factorial_moment() == doctest::Approx(3.0));
  CHECK(dist.probability_of_one() == 0.5);

  // Size-biased law puts mass k p_k / 2: 1/4 on 1 and 3/4 on 3.
  RandomStream rng(7);
  const int n = 200000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    if (dist.sample_size_biased(rng) == 1) ++ones;
  }
  const double freq = static_cast<double>(ones) / n;
  const double se = std::sqrt(0.25 * 0.75 / n);
  CHECK(std::abs(freq - 0.25) < 3 * se);
}

TEST_CASE("zero-probability entries are allowed and dropped") {
  const OffspringDistribution dist({{1, 0.5}, {2, 0.0}, {3, 0.5}});
  CHECK(dist.support().size() == 2);
  CHECK(dist.probability(2) == 0.0);
}

TEST_CASE("validation rejects malformed laws with precise messages") {
  CHECK_THROWS_WITH_AS(OffspringDistribution({{1, 0.5}, {2, 0.5}}),
                       doctest::Contains("mean offspring count is 1.5"),
                       std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution({{2, 0.9}}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution({{0, 0.5}, {4, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution({{1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution({{2, 0.5}, {2, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution({{1, -0.1}, {2, 1.1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution({{1, 0.9}, {65, 0.1}}),
                  std::invalid_argument);
}

TEST_CASE("sampling matches the law empirically") {
  const OffspringDistribution dist({{1, 0.4}, {2, 0.3}, {3, 0.2}, {4, 0.1}});
  CHECK(dist.second_factorial_moment() == doctest::Approx(3.0));
  RandomStream rng(11);
  const int n = 200000;
  int counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[dist.sample(rng)];
  const double expected[5] = {0.0, 0.4, 0.3, 0.2, 0.1};
  for (int k = 1; k <= 4; ++k) {
    const double freq = static_cast<double>(counts[k]) / n;
    const double se = std::sqrt(expected[k] * (1 - expected[k]) / n);
    CHECK(std::abs(freq - expected[k]) < 4 * se);
  }
}
