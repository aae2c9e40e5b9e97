#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bbmx/random.hpp"
#include "bbmx/stats.hpp"

using namespace bbmx;

TEST_CASE("two-sample ks distance") {
  CHECK(ks_distance({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_distance({0.0, 1.0}, {5.0, 6.0}) == 1.0);
  CHECK(ks_distance({0.0, 1.0}, {0.0, 1.0, 2.0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(ks_distance({0.0, 1.0, 2.0}, {0.0, 1.0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(ks_distance({}, {1.0}), std::invalid_argument);
}

TEST_CASE("one-sample ks against an analytic cdf") {
  std::vector<double> uniform;
  for (int i = 0; i < 1000; ++i) uniform.push_back((i + 0.5) / 1000.0);
  const double d =
      ks_distance_to_cdf(uniform, [](double x) { return x; });
  CHECK(d <= 0.5 / 1000.0 + 1e-12);
}

TEST_CASE("tail slope recovers an exact exponential survivor") {
  // Deterministic sample whose empirical survivor matches e^{-sqrt2 x}.
  const int n = 200000;
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    values[i] = -std::log((i + 0.5) / n) / std::numbers::sqrt2;
  }
  const TailSlopeFit fit = tail_slope(values, 0.5, 2.5, 21);
  CHECK(fit.slope_raw ==
        doctest::Approx(-std::numbers::sqrt2).epsilon(0.02));
  CHECK(fit.exceedances > 100);

  // Additive shifts move the window with the data and leave the slope alone.
  std::vector<double> shifted(values);
  for (double& v : shifted) v += 2.0;
  const TailSlopeFit fit2 = tail_slope(shifted, 2.5, 4.5, 21);
  CHECK(fit2.slope_raw == doctest::Approx(fit.slope_raw).epsilon(1e-9));

  // The corrected fit divides the x prefactor out of an x e^{-sqrt2 x} tail.
  RandomStream rng(8);
  std::vector<double> gamma_tail;
  for (int i = 0; i < 400000; ++i) {
    // Gamma(2, 1/sqrt2) via the sum of two exponentials: survivor has the
    // (1 + sqrt2 x) e^{-sqrt2 x} shape, close to x e^{-sqrt2 x} for large x.
    gamma_tail.push_back(rng.exponential(std::numbers::sqrt2) +
                         rng.exponential(std::numbers::sqrt2));
  }
  const TailSlopeFit fit3 = tail_slope(gamma_tail, 2.0, 4.0, 21);
  CHECK(fit3.slope_corrected < fit3.slope_raw);  // correction steepens

  // The gamma survivor is exactly (1 + sqrt2 x) e^{-sqrt2 x}, so dividing the
  // prefactor (x + 1/sqrt2) out recovers the bare exponent.
  const TailSlopeFit fit4 =
      tail_slope(gamma_tail, 2.0, 4.0, 21, 1.0 / std::numbers::sqrt2);
  CHECK(fit4.slope_corrected ==
        doctest::Approx(-std::numbers::sqrt2).epsilon(0.03));

  CHECK_THROWS_AS(tail_slope({1.0, 2.0}, 0.5, 2.5, 21),
                  std::invalid_argument);
}

TEST_CASE("dispersion index") {
  std::vector<std::uint64_t> constant(50, 3);
  CHECK(dispersion_index(constant) == 0.0);

  RandomStream rng(42);
  std::vector<std::uint64_t> poisson;
  const double lambda = 2.5;
  for (int i = 0; i < 50000; ++i) {
    // Inverse-transform Poisson sampling.
    double u = rng.uniform01();
    double p = std::exp(-lambda);
    double cum = p;
    std::uint64_t k = 0;
    while (u > cum && k < 100) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
    }
    poisson.push_back(k);
  }
  const double index = dispersion_index(poisson);
  CHECK(std::abs(index - 1.0) < 3.0 * std::sqrt(2.0 / poisson.size()));

  // Mixing two intensities overdisperses.
  std::vector<std::uint64_t> mixed(poisson.begin(), poisson.begin() + 20000);
  for (std::size_t i = 0; i < 20000; ++i) mixed.push_back(poisson[i] * 3);
  CHECK(dispersion_index(mixed) > 1.0);

  CHECK_THROWS_AS(dispersion_index(std::vector<std::uint64_t>(10, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dispersion_index(std::vector<std::uint64_t>(40, 0)),
                  std::invalid_argument);
}

TEST_CASE("dichotomy fraction and window nesting") {
  const std::vector<double> overlaps{0.5, 2.0, 5.0, 9.5, 11.0};
  CHECK(dichotomy_fraction(overlaps, 6.0, 12.0) == 0.0);  // empty window
  CHECK(dichotomy_fraction(overlaps, 1.0, 12.0) ==
        doctest::Approx(3.0 / 5.0));
  CHECK(dichotomy_fraction(overlaps, 3.0, 12.0) ==
        doctest::Approx(1.0 / 5.0));
  // Nested windows are monotone by construction.
  double previous = 1.0;
  for (double r : {1.0, 2.0, 3.0, 4.0}) {
    const double f = dichotomy_fraction(overlaps, r, 12.0);
    CHECK(f <= previous);
    previous = f;
  }
  CHECK_THROWS_AS(dichotomy_fraction({}, 1.0, 12.0), std::invalid_argument);
}

TEST_CASE("summary helpers") {
  CHECK(mean({1.0, 2.0, 3.0}) == 2.0);
  CHECK(sample_variance({1.0, 2.0, 3.0}) == 1.0);
  CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1.0, 2.0}, 0.0) == 1.0);
  CHECK(quantile({1.0, 2.0}, 1.0) == 2.0);

  std::vector<double> values;
  for (int i = 0; i < 160; ++i) values.push_back(static_cast<double>(i % 16));
  CHECK(median_of_means(values, 16) == doctest::Approx(7.5));
  CHECK_THROWS_AS(median_of_means({1.0}, 16), std::invalid_argument);
}
