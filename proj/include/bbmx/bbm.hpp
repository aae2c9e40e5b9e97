#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bbmx/gw_tree.hpp"
#include "bbmx/offspring.hpp"
#include "bbmx/random.hpp"

namespace bbmx {

// Front centering sqrt(2) t - (3 / (2 sqrt(2))) ln t.
double centering(double t);

// Kill line for pruned runs: a particle observed at time s below
//   (s/t) centering(t) - (s ^ (t-s))^alpha - L
// is removed together with its descendants. alpha == 0 switches the curve
// term off entirely (straight line).
struct PruneBarrier {
  double offset = 8.0;  // L >= 0
  double alpha = 0.0;   // in [0, 1/2)

  double threshold(double s, double t) const;
};

struct BbmConfig {
  double horizon = 6.0;
  OffspringDistribution offspring = OffspringDistribution::binary();
  std::vector<double> checkpoints;  // sorted, within [0, horizon]
  double cutoff = -8.0;             // serialization cutoff; never affects simulation
  std::optional<PruneBarrier> prune;
  TreeLimits limits;

  void validate() const;  // throws std::invalid_argument
};

// One realized branching Brownian motion. Positions are realized exactly at
// node boundaries (branching events, the horizon) and at declared checkpoint
// times; checkpoints are no-op events, never interpolations. Ancestral
// checkpoint values are stored once per (node, checkpoint) and shared by all
// descendants. Immutable after construction.
struct BbmSnapshot {
  GenealogyTree tree;
  std::vector<double> checkpoints;
  // Position at each node's end time (its branching event, or the horizon
  // for leaves). NaN where a pruned run never realized the node.
  std::vector<double> node_end_position;
  // Per checkpoint: (node, position) for every node whose lifetime covers the
  // checkpoint, ascending node id.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> checkpoint_positions;
  std::vector<std::uint32_t> leaves;  // surviving leaves, ascending node id
  double horizon = 0.0;
  double m_t = 0.0;
  bool pruned = false;
  bool empty_after_prune = false;

  std::size_t particle_count() const { return leaves.size(); }
  double position(std::size_t k) const { return node_end_position[leaves[k]]; }
  // Exact ancestral position x_k(r); r must be 0, the horizon, or a declared
  // checkpoint.
  double position_at(std::size_t k, double r) const;
  // Embedding coordinate of particle k's label, optionally truncated at r.
  double embedding(std::size_t k) const {
    return tree.embedding_of(leaves[k]);
  }
  double embedding_at(std::size_t k, double r) const {
    return tree.embedding_of(leaves[k], r);
  }
  std::size_t checkpoint_index(double r) const;  // throws on unknown r
};

// Exact simulation of one replica. The genealogy consumes the tree stream of
// `key`; each node's displacements consume a stream derived from (key, node),
// so a pruned run is a bit-exact coupling of the unpruned run with the same
// key: surviving particles carry identical positions.
BbmSnapshot simulate(const BbmConfig& config, const StreamKey& key);

// max_k x_k(t) - m(t); throws std::invalid_argument on an empty snapshot.
double max_centered(const BbmSnapshot& snapshot);

// Kill mask the barrier would have produced for this (unpruned) snapshot:
// true = killed. Equals the in-simulation pruning of the same replica key.
std::vector<char> prune_mask(const BbmSnapshot& snapshot,
                             const PruneBarrier& barrier);

// Leaves surviving the mask, ascending node id.
std::vector<std::uint32_t> surviving_leaves(const BbmSnapshot& snapshot,
                                            const PruneBarrier& barrier);

}  // namespace bbmx
