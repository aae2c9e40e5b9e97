#pragma once

#include <span>
#include <vector>

#include "bbmx/bbm.hpp"

namespace bbmx {

// Z_t = sum_j (sqrt(2) t - x_j) exp(sqrt(2)(x_j - sqrt(2) t)), summed in
// particle-id order. Requires an unpruned snapshot (pruning biases the sum).
double derivative_martingale(const BbmSnapshot& snapshot);

// Y_t = sum_j exp(sqrt(2)(x_j - sqrt(2) t)).
double mckean_martingale(const BbmSnapshot& snapshot);

// Z_t restricted to particles whose ancestral embedding coordinate at
// checkpoint r is <= v. With v = +infinity this reproduces
// derivative_martingale bit-for-bit (same terms, same order).
double truncated_derivative_martingale(const BbmSnapshot& snapshot, double v,
                                       double r);

struct DecompositionCheck {
  double lhs = 0.0;  // truncated martingale summed over particles
  double rhs = 0.0;  // recomputed over time-r ancestors and their subtrees
  double relative_error() const;
};

// Exact identity: the truncated martingale equals, over ancestors i alive at
// checkpoint r with embedding <= v,
//   exp(sqrt2 (x_i(r) - sqrt2 r)) [ (sqrt2 r - x_i(r)) Y^(i) + Z^(i) ],
// where Y^(i), Z^(i) are computed from i's subtree with positions recentered
// by x_i(r) and time by r.
DecompositionCheck ancestral_decomposition_check(const BbmSnapshot& snapshot,
                                                 double v, double r);

// Empirical profile of v -> Z(v, r, t) across replicas, plus non-atomicity
// diagnostics: the largest single jump of the step function relative to the
// total jump mass, and the magnitude of the negative-term part.
struct MartingaleMeasureProfile {
  std::vector<double> v_grid;
  std::vector<std::vector<double>> per_replica;  // [replica][grid]
  std::vector<double> largest_jump_ratio;        // per replica, in [0, 1]
  std::vector<double> negative_part;             // per replica, >= 0
  std::vector<double> grid_median;               // per grid point
};

MartingaleMeasureProfile martingale_measure_profile(
    std::span<const BbmSnapshot> snapshots, std::span<const double> v_grid,
    double r);

}  // namespace bbmx
