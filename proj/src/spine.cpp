#include "bbmx/spine.hpp"

#include <cmath>
#include <stdexcept>

namespace bbmx {

SpineRealization sample_spine(double horizon, const OffspringDistribution& dist,
                              RandomStream& rng) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("sample_spine: horizon must be > 0");
  }
  SpineRealization spine;
  spine.horizon = horizon;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(2.0);
    if (t > horizon) break;
    const std::uint32_t l = dist.sample_size_biased(rng);
    spine.times.push_back(t);
    spine.offspring.push_back(l);
    spine.marks.push_back(rng.uniform_below(l));
  }
  return spine;
}

double campbell_functional(const SpineRealization& spine, double r, double t) {
  if (!(0.0 <= r) || !(r <= t) || t > spine.horizon) {
    throw std::invalid_argument(
        "campbell_functional: window must satisfy 0 <= r <= t <= horizon");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < spine.times.size(); ++j) {
    const double tj = spine.times[j];
    if (tj < r) continue;
    if (tj > t) break;
    sum += (spine.offspring[j] - 1.0) * std::exp(-tj);
  }
  return sum;
}

double erlang_survival(std::uint32_t i_star, double s) {
  if (i_star < 1) {
    throw std::invalid_argument("erlang_survival: index must be >= 1");
  }
  if (!(s >= 0.0)) {
    throw std::invalid_argument("erlang_survival: time must be >= 0");
  }
  const double lambda_s = 2.0 * s;
  double term = 1.0;
  double sum = 1.0;
  for (std::uint32_t i = 1; i < i_star; ++i) {
    term *= lambda_s / i;
    sum += term;
  }
  return std::exp(-lambda_s) * sum;
}

double first_nonzero_mark_law(const OffspringDistribution& dist,
                              std::uint32_t i_star) {
  if (i_star < 1) {
    throw std::invalid_argument("first_nonzero_mark_law: index must be >= 1");
  }
  // Size-biased expectations of 1/l and 1 - 1/l.
  double inv_mean = 0.0;
  for (const auto& [k, p] : dist.support()) {
    inv_mean += (static_cast<double>(k) * p / 2.0) / k;
  }
  const double nonzero = 1.0 - inv_mean;
  return nonzero * std::pow(inv_mean, static_cast<double>(i_star - 1));
}

}  // namespace bbmx
