#include "bbmx/martingales.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace bbmx {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unpruned(const BbmSnapshot& snapshot, const char* what) {
  if (snapshot.pruned) {
    throw std::invalid_argument(std::string(what) +
                                ": requires an unpruned snapshot");
  }
}

}  // namespace

double derivative_martingale(const BbmSnapshot& snapshot) {
  return truncated_derivative_martingale(snapshot, kInf, -1.0);
}

double mckean_martingale(const BbmSnapshot& snapshot) {
  require_unpruned(snapshot, "mckean_martingale");
  const double t = snapshot.horizon;
  double sum = 0.0;
  for (std::size_t k = 0; k < snapshot.particle_count(); ++k) {
    sum += std::exp(kSqrt2 * (snapshot.position(k) - kSqrt2 * t));
  }
  return sum;
}

double truncated_derivative_martingale(const BbmSnapshot& snapshot, double v,
                                       double r) {
  require_unpruned(snapshot, "truncated_derivative_martingale");
  const bool truncate = v != kInf;
  if (truncate) snapshot.checkpoint_index(r);  // validates r
  const double t = snapshot.horizon;
  double sum = 0.0;
  for (std::size_t k = 0; k < snapshot.particle_count(); ++k) {
    if (truncate && !(snapshot.embedding_at(k, r) <= v)) continue;
    const double x = snapshot.position(k);
    sum += (kSqrt2 * t - x) * std::exp(kSqrt2 * (x - kSqrt2 * t));
  }
  return sum;
}

double DecompositionCheck::relative_error() const {
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

DecompositionCheck ancestral_decomposition_check(const BbmSnapshot& snapshot,
                                                 double v, double r) {
  require_unpruned(snapshot, "ancestral_decomposition_check");
  snapshot.checkpoint_index(r);
  const double t = snapshot.horizon;
  const double tail = t - r;

  DecompositionCheck check;
  check.lhs = truncated_derivative_martingale(snapshot, v, r);

  // Subtree martingales per time-r ancestor, recentered at (x_i(r), r).
  struct Subtree {
    double x_r = 0.0;
    double mckean = 0.0;
    double derivative = 0.0;
  };
  std::map<std::uint32_t, Subtree> ancestors;
  for (std::size_t k = 0; k < snapshot.particle_count(); ++k) {
    const std::uint32_t node = snapshot.tree.ancestor_at(snapshot.leaves[k], r);
    auto [it, inserted] = ancestors.try_emplace(node);
    Subtree& sub = it->second;
    if (inserted) sub.x_r = snapshot.position_at(k, r);
    const double y = snapshot.position(k) - sub.x_r;
    const double w = std::exp(kSqrt2 * (y - kSqrt2 * tail));
    sub.mckean += w;
    sub.derivative += (kSqrt2 * tail - y) * w;
  }
  for (const auto& [node, sub] : ancestors) {
    if (!(snapshot.tree.embedding_of(node, r) <= v)) continue;
    check.rhs += std::exp(kSqrt2 * (sub.x_r - kSqrt2 * r)) *
                 ((kSqrt2 * r - sub.x_r) * sub.mckean + sub.derivative);
  }
  return check;
}

MartingaleMeasureProfile martingale_measure_profile(
    std::span<const BbmSnapshot> snapshots, std::span<const double> v_grid,
    double r) {
  if (snapshots.empty()) {
    throw std::invalid_argument("martingale_measure_profile: no snapshots");
  }
  const double t = snapshots.front().horizon;
  for (const auto& snap : snapshots) {
    if (snap.horizon != t) {
      throw std::invalid_argument(
          "martingale_measure_profile: snapshots disagree on horizon");
    }
    snap.checkpoint_index(r);
  }

  MartingaleMeasureProfile profile;
  profile.v_grid.assign(v_grid.begin(), v_grid.end());
  profile.per_replica.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    // Group particle contributions by ancestral embedding value; each group
    // is one jump of the step function.
    std::map<double, double> jumps;
    double negative = 0.0;
    for (std::size_t k = 0; k < snap.particle_count(); ++k) {
      const double x = snap.position(k);
      const double term = (kSqrt2 * t - x) * std::exp(kSqrt2 * (x - kSqrt2 * t));
      jumps[snap.embedding_at(k, r)] += term;
      if (term < 0.0) negative -= term;
    }
    double total_abs = 0.0;
    double max_abs = 0.0;
    for (const auto& [gamma, jump] : jumps) {
      total_abs += std::abs(jump);
      max_abs = std::max(max_abs, std::abs(jump));
    }
    profile.largest_jump_ratio.push_back(total_abs > 0.0 ? max_abs / total_abs
                                                         : 0.0);
    profile.negative_part.push_back(negative);

    std::vector<double> row;
    row.reserve(v_grid.size());
    auto it = jumps.begin();
    double acc = 0.0;
    for (double v : v_grid) {
      while (it != jumps.end() && it->first <= v) {
        acc += it->second;
        ++it;
      }
      row.push_back(acc);
    }
    profile.per_replica.push_back(std::move(row));
  }

  profile.grid_median.resize(v_grid.size());
  std::vector<double> column(snapshots.size());
  for (std::size_t g = 0; g < v_grid.size(); ++g) {
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
      column[i] = profile.per_replica[i][g];
    }
    std::nth_element(column.begin(), column.begin() + column.size() / 2,
                     column.end());
    profile.grid_median[g] = column[column.size() / 2];
  }
  return profile;
}

}  // namespace bbmx
