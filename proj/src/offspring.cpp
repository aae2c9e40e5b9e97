#include "bbmx/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bbmx {

OffspringDistribution::OffspringDistribution(std::vector<Entry> probabilities) {
  std::sort(probabilities.begin(), probabilities.end());
  double total = 0.0;
  double mean = 0.0;
  for (const auto& [k, p] : probabilities) {
    if (k < 1) {
      throw std::invalid_argument(
          "offspring law: child count " + std::to_string(k) +
          " is not allowed, counts must be at least 1");
    }
    if (k > kMaxChildCount) {
      throw std::invalid_argument(
          "offspring law: child count " + std::to_string(k) +
          " exceeds the supported maximum of " + std::to_string(kMaxChildCount));
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("offspring law: p_" + std::to_string(k) +
                                  " must be a finite non-negative probability");
    }
    if (!probs_.empty() && probs_.back().first == k) {
      throw std::invalid_argument("offspring law: duplicate entry for k = " +
                                  std::to_string(k));
    }
    total += p;
    mean += static_cast<double>(k) * p;
    if (p > 0.0) {
      probs_.emplace_back(k, p);
      second_factorial_moment_ += static_cast<double>(k) * (k - 1.0) * p;
      size_biased_mean_ += static_cast<double>(k) * k * p / 2.0;
    }
  }
  if (probs_.empty()) {
    throw std::invalid_argument("offspring law: no positive-probability entry");
  }
  if (std::abs(total - 1.0) > kTolerance) {
    std::ostringstream msg;
    msg << "offspring law: probabilities sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  if (std::abs(mean - 2.0) > kTolerance) {
    std::ostringstream msg;
    msg << "offspring law: mean offspring count is " << mean << ", expected 2";
    throw std::invalid_argument(msg.str());
  }
  if (probability_of_one() >= 1.0 - kTolerance) {
    throw std::invalid_argument("offspring law: p_1 must be strictly below 1");
  }

  double acc = 0.0;
  double sb_acc = 0.0;
  for (const auto& [k, p] : probs_) {
    acc += p;
    sb_acc += static_cast<double>(k) * p / 2.0;
    cdf_.push_back(acc);
    size_biased_cdf_.push_back(sb_acc);
  }
  cdf_.back() = 1.0;
  size_biased_cdf_.back() = 1.0;
}

double OffspringDistribution::probability(std::uint32_t k) const {
  for (const auto& [kk, p] : probs_) {
    if (kk == k) return p;
  }
  return 0.0;
}

double OffspringDistribution::probability_of_one() const {
  return probability(1);
}

namespace {

std::uint32_t pick(const std::vector<OffspringDistribution::Entry>& probs,
                   const std::vector<double>& cdf, double u) {
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
    if (u < cdf[i]) return probs[i].first;
  }
  return probs.back().first;
}

}  // namespace

std::uint32_t OffspringDistribution::sample(RandomStream& rng) const {
  return pick(probs_, cdf_, rng.uniform01());
}

std::uint32_t OffspringDistribution::sample_size_biased(
    RandomStream& rng) const {
  return pick(probs_, size_biased_cdf_, rng.uniform01());
}

}  // namespace bbmx
