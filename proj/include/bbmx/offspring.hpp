#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bbmx/random.hpp"

namespace bbmx {

// Offspring law p_k on k >= 1, normalised to mean 2. Carries the second
// factorial moment K = sum k(k-1) p_k and the size-biased law k p_k / 2 used
// by the spine samplers. Construction validates:
//   sum p_k = 1 and sum k p_k = 2, both to 1e-12,
//   k >= 1 (no death), k <= 64, p_1 < 1, all p_k >= 0.
class OffspringDistribution {
 public:
  static constexpr std::uint32_t kMaxChildCount = 64;
  static constexpr double kTolerance = 1e-12;

  using Entry = std::pair<std::uint32_t, double>;  // (k, p_k)

  // Throws std::invalid_argument with a precise message on any violation.
  explicit OffspringDistribution(std::vector<Entry> probabilities);

  // Strictly dyadic branching, p_2 = 1.
  static OffspringDistribution binary() {
    return OffspringDistribution({{2, 1.0}});
  }

  const std::vector<Entry>& support() const { return probs_; }
  double probability(std::uint32_t k) const;
  double probability_of_one() const;  // p_1
  // K = sum k(k-1) p_k.
  double second_factorial_moment() const { return second_factorial_moment_; }
  // E l under the size-biased law, sum k^2 p_k / 2.
  double size_biased_mean() const { return size_biased_mean_; }
  std::uint32_t max_child_count() const { return probs_.back().first; }

  // Each draw consumes exactly one uniform from the stream.
  std::uint32_t sample(RandomStream& rng) const;
  std::uint32_t sample_size_biased(RandomStream& rng) const;

 private:
  std::vector<Entry> probs_;  // ascending k, zero-probability entries dropped
  std::vector<double> cdf_;
  std::vector<double> size_biased_cdf_;
  double second_factorial_moment_ = 0.0;
  double size_biased_mean_ = 0.0;
};

}  // namespace bbmx
