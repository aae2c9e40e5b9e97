#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bbmx/bbm.hpp"
#include "bbmx/extremal.hpp"

namespace bbmx {

// Rejection budget exhausted before a conditioned snapshot was accepted.
class RejectionBudgetError : public std::runtime_error {
 public:
  RejectionBudgetError(std::uint64_t attempts, double acceptance_estimate);
  std::uint64_t attempts() const { return attempts_; }
  double acceptance_estimate() const { return acceptance_estimate_; }

 private:
  std::uint64_t attempts_;
  double acceptance_estimate_;
};

struct ConditionedSample {
  BbmSnapshot snapshot;
  std::uint64_t attempts = 0;  // rejection attempts used, including the accept
};

// Rejection sampling of a BBM conditioned on max_j x_j(t) >= sqrt(2) t. Each
// attempt consumes an independent substream of `key`, so results do not
// depend on how attempts are scheduled. Practical up to t of about 8.
ConditionedSample sample_conditioned(double t,
                                     const OffspringDistribution& offspring,
                                     const StreamKey& key,
                                     std::uint64_t max_attempts,
                                     const TreeLimits& limits = {});

// Relative positions around a reference particle; the reference contributes
// the zero atom and every atom is value-sorted descending.
struct DecorationSample {
  std::vector<double> atoms;
  std::vector<std::uint32_t> particles;  // indices into snapshot.leaves
  double horizon = 0.0;
  std::optional<double> truncation_r;
};

// Atoms x_i(t) - max_j x_j(t) for all particles, or, when r is given, only
// for particles whose overlap with the argmax lineage is >= t - r.
DecorationSample decoration_atoms(const BbmSnapshot& snapshot,
                                  std::optional<double> r = {});

// Recent relatives of a cluster representative: the zero atom plus every
// particle of the snapshot whose lineage split from the representative's
// after time t - r, relative to the representative's position.
DecorationSample recent_relatives(const BbmSnapshot& snapshot,
                                  const ExtendedPointSample& sample,
                                  const ClusterDecomposition& clusters,
                                  std::size_t cluster_index, double r);

}  // namespace bbmx
