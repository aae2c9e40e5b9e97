#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bbmx/spine.hpp"
#include "bbmx/stats.hpp"

using namespace bbmx;

TEST_CASE("arrival intensity is 2 per unit time") {
  const auto dist = OffspringDistribution::binary();
  const int replicas = 100000;
  double total = 0.0, ss = 0.0;
  RandomStream rng(404);
  for (int i = 0; i < replicas; ++i) {
    const double n =
        static_cast<double>(sample_spine(3.0, dist, rng).times.size());
    total += n;
    ss += n * n;
  }
  const double mean = total / replicas;
  const double sd = std::sqrt(ss / replicas - mean * mean);
  CHECK(std::abs(mean - 6.0) < 3.0 * sd / std::sqrt(replicas));
}

TEST_CASE("binary offspring size-biases to the constant 2 with fair marks") {
  const auto dist = OffspringDistribution::binary();
  RandomStream rng(11);
  int ones = 0, total = 0;
  for (int i = 0; i < 20000; ++i) {
    const SpineRealization spine = sample_spine(2.0, dist, rng);
    for (std::size_t j = 0; j < spine.offspring.size(); ++j) {
      REQUIRE(spine.offspring[j] == 2);
      REQUIRE(spine.marks[j] <= 1);
      ones += spine.marks[j];
      ++total;
    }
  }
  const double freq = static_cast<double>(ones) / total;
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / total));
}

TEST_CASE("campbell functional fixtures") {
  SpineRealization spine;
  spine.horizon = 3.0;
  spine.times = {2.0};
  spine.offspring = {3};
  spine.marks = {1};
  CHECK(campbell_functional(spine, 1.0, 3.0) ==
        doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(campbell_functional(spine, 1.5, 1.5) == 0.0);
  CHECK_THROWS_AS(campbell_functional(spine, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(campbell_functional(spine, 0.0, 4.0), std::invalid_argument);
}

TEST_CASE("campbell mean matches K (e^-r - e^-t)") {
  const auto dist = OffspringDistribution::binary();
  const int replicas = 100000;
  RandomStream rng(2077);
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < replicas; ++i) {
    const double value =
        campbell_functional(sample_spine(3.0, dist, rng), 1.0, 3.0);
    sum += value;
    ss += value * value;
  }
  const double mean = sum / replicas;
  const double target = 2.0 * (std::exp(-1.0) - std::exp(-3.0));
  const double sd = std::sqrt(ss / replicas - mean * mean);
  CHECK(target == doctest::Approx(0.636184).epsilon(1e-4));
  CHECK(std::abs(mean - target) < 3.0 * sd / std::sqrt(replicas));
}

TEST_CASE("erlang survival closed forms") {
  CHECK(erlang_survival(1, 0.5) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(erlang_survival(3, 0.0) == 1.0);
  CHECK(erlang_survival(2, 1.0) ==
        doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(erlang_survival(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(erlang_survival(1, -0.1), std::invalid_argument);
}

TEST_CASE("erlang survival agrees with density quadrature") {
  // Independent oracle: integrate the Erlang(2, i) density on [s, s + 30]
  // with Simpson's rule.
  const auto survival_by_quadrature = [](std::uint32_t i, double s) {
    const int steps = 20000;
    const double upper = s + 30.0;
    const double h = (upper - s) / steps;
    double factorial = 1.0;
    for (std::uint32_t k = 2; k < i; ++k) factorial *= k;
    const auto density = [&](double x) {
      return 2.0 * std::pow(2.0 * x, static_cast<double>(i - 1)) *
             std::exp(-2.0 * x) / factorial;
    };
    double acc = density(s) + density(upper);
    for (int k = 1; k < steps; ++k) {
      acc += density(s + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
  };
  for (std::uint32_t i : {1u, 2u, 5u}) {
    for (double s : {0.3, 1.0, 2.0}) {
      CHECK(erlang_survival(i, s) ==
            doctest::Approx(survival_by_quadrature(i, s)).epsilon(1e-7));
    }
  }
}

TEST_CASE("arrival times follow the erlang law empirically") {
  const auto dist = OffspringDistribution::binary();
  RandomStream rng(31337);
  std::vector<double> second_arrival;
  for (int i = 0; i < 20000; ++i) {
    const SpineRealization spine = sample_spine(10.0, dist, rng);
    if (spine.times.size() >= 2) second_arrival.push_back(spine.times[1]);
  }
  const double ks = ks_distance_to_cdf(
      second_arrival, [](double s) { return 1.0 - erlang_survival(2, s); });
  CHECK(ks < 0.02);
}

TEST_CASE("first nonzero mark law and bound") {
  const auto binary = OffspringDistribution::binary();
  CHECK(first_nonzero_mark_law(binary, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(first_nonzero_mark_law(binary, 3) ==
        doctest::Approx(0.125).epsilon(1e-15));
  const OffspringDistribution mixed({{1, 0.5}, {3, 0.5}});
  const OffspringDistribution heavy({{1, 0.9}, {11, 0.1}});
  for (const auto& dist : {binary, mixed, heavy}) {
    const double p1 = dist.probability_of_one();
    for (std::uint32_t i = 1; i <= 20; ++i) {
      CHECK(first_nonzero_mark_law(dist, i) <=
            std::pow((1.0 + p1) / 2.0, static_cast<double>(i - 1)) + 1e-15);
    }
  }

  // Empirical frequency of the first nonzero mark index.
  RandomStream rng(808);
  const int replicas = 20000;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < replicas; ++i) {
    const SpineRealization spine = sample_spine(12.0, mixed, rng);
    for (std::size_t j = 0; j < spine.marks.size(); ++j) {
      if (spine.marks[j] != 0) {
        if (j < counts.size()) ++counts[j];
        break;
      }
    }
  }
  for (std::size_t m = 1; m <= counts.size(); ++m) {
    const double law =
        first_nonzero_mark_law(mixed, static_cast<std::uint32_t>(m));
    const double freq = static_cast<double>(counts[m - 1]) / replicas;
    const double se = std::sqrt(law * (1 - law) / replicas);
    CHECK(std::abs(freq - law) < 4.0 * se + 1e-3);
  }
}
