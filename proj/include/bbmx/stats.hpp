#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace bbmx {

// Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs.
// Tie-safe; both samples must be non-empty.
double ks_distance(std::vector<double> a, std::vector<double> b);

// One-sample variant against an analytic CDF.
double ks_distance_to_cdf(std::vector<double> sample,
                          const std::function<double(double)>& cdf);

struct TailSlopeFit {
  double slope_raw = 0.0;        // d/dx ln S(x) fitted over the window grid
  double slope_corrected = 0.0;  // same with the x-prefactor divided out
  std::size_t exceedances = 0;   // values above the window's lower edge
};

// Least-squares slope of ln(empirical survivor count) against x on an evenly
// spaced grid over [window_low, window_high]. The corrected fit divides the
// survivor by the known prefactor (x + prefactor_offset) first; the offset
// accommodates the finite-horizon form of the prefactor (0 gives the bare
// asymptotic x). Requires window_low + prefactor_offset > 0 and at least 100
// exceedances of window_low.
TailSlopeFit tail_slope(const std::vector<double>& values, double window_low,
                        double window_high, int grid_points = 21,
                        double prefactor_offset = 0.0);

// Sample variance (unbiased) divided by sample mean. Requires >= 30 counts
// and a positive mean.
double dispersion_index(const std::vector<std::uint64_t>& counts);

// Fraction of pair overlap times falling strictly inside (r, t - r).
double dichotomy_fraction(const std::vector<double>& pair_overlaps, double r,
                          double t);

// Small reusable summaries.
double mean(const std::vector<double>& values);
double sample_variance(const std::vector<double>& values);
double quantile(std::vector<double> values, double p);  // linear interpolation
double median_of_means(const std::vector<double>& values, std::size_t blocks);

// One named check with its statistics, threshold and verdict; thresholds are
// recorded next to the values so reports are self-describing.
struct DiagnosticReport {
  int id = 0;
  std::string name;
  std::string inputs;
  std::vector<std::pair<std::string, double>> statistics;
  std::string threshold;
  bool pass = false;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

}  // namespace bbmx
