#include "bbmx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bbmx {

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_distance: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (i < a.size() && j < b.size()) {
      x = std::min(a[i], b[j]);
    } else if (i < a.size()) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_distance_to_cdf(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  if (sample.empty()) {
    throw std::invalid_argument("ks_distance_to_cdf: empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  return d;
}

TailSlopeFit tail_slope(const std::vector<double>& values, double window_low,
                        double window_high, int grid_points,
                        double prefactor_offset) {
  if (!(window_low < window_high) || grid_points < 2) {
    throw std::invalid_argument("tail_slope: bad window");
  }
  const bool correctable = window_low + prefactor_offset > 0.0;
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const auto survivor = [&](double x) {
    return sorted.end() -
           std::upper_bound(sorted.begin(), sorted.end(), x);
  };
  TailSlopeFit fit;
  fit.exceedances = static_cast<std::size_t>(survivor(window_low));
  if (fit.exceedances < 100) {
    throw std::invalid_argument(
        "tail_slope: fewer than 100 values exceed the window");
  }
  std::vector<double> xs, raw, corrected;
  const double step = (window_high - window_low) / (grid_points - 1);
  for (int g = 0; g < grid_points; ++g) {
    const double x = window_low + g * step;
    const double count = static_cast<double>(survivor(x));
    if (count <= 0.0) break;  // grid truncated where the tail runs out
    xs.push_back(x);
    raw.push_back(std::log(count));
    if (correctable) {
      corrected.push_back(std::log(count / (x + prefactor_offset)));
    }
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("tail_slope: window has no populated grid");
  }
  const auto ls_slope = [&](const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k];
      sy += ys[k];
      sxx += xs[k] * xs[k];
      sxy += xs[k] * ys[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  fit.slope_raw = ls_slope(raw);
  fit.slope_corrected = correctable
                            ? ls_slope(corrected)
                            : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

double dispersion_index(const std::vector<std::uint64_t>& counts) {
  if (counts.size() < 30) {
    throw std::invalid_argument("dispersion_index: need at least 30 counts");
  }
  std::vector<double> values(counts.begin(), counts.end());
  const double m = mean(values);
  if (m <= 0.0) {
    throw std::invalid_argument("dispersion_index: zero mean");
  }
  return sample_variance(values) / m;
}

double dichotomy_fraction(const std::vector<double>& pair_overlaps, double r,
                          double t) {
  if (pair_overlaps.empty()) {
    throw std::invalid_argument("dichotomy_fraction: no pairs");
  }
  std::size_t inside = 0;
  for (double d : pair_overlaps) {
    if (d > r && d < t - r) ++inside;
  }
  return static_cast<double>(inside) / pair_overlaps.size();
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double idx = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double median_of_means(const std::vector<double>& values, std::size_t blocks) {
  if (blocks == 0 || values.size() < blocks) {
    throw std::invalid_argument("median_of_means: too few values");
  }
  std::vector<double> block_means;
  block_means.reserve(blocks);
  const std::size_t n = values.size();
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t begin = b * n / blocks;
    const std::size_t end = (b + 1) * n / blocks;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += values[i];
    block_means.push_back(sum / static_cast<double>(end - begin));
  }
  std::sort(block_means.begin(), block_means.end());
  const std::size_t mid = blocks / 2;
  return blocks % 2 == 1 ? block_means[mid]
                         : 0.5 * (block_means[mid - 1] + block_means[mid]);
}

}  // namespace bbmx
