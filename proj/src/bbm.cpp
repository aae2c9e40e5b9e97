#include "bbmx/bbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bbmx {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogFactor = 3.0 / (2.0 * std::numbers::sqrt2);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double centering(double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("centering: time must be positive");
  }
  return kSqrt2 * t - kLogFactor * std::log(t);
}

double PruneBarrier::threshold(double s, double t) const {
  const double line = (s / t) * centering(t);
  const double curve = alpha > 0.0 ? std::pow(std::min(s, t - s), alpha) : 0.0;
  return line - curve - offset;
}

void BbmConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("config: horizon must be finite and > 0");
  }
  if (!std::isfinite(cutoff)) {
    throw std::invalid_argument("config: cutoff must be finite");
  }
  double prev = -1.0;
  for (double r : checkpoints) {
    if (!(r >= 0.0) || r > horizon) {
      throw std::invalid_argument("config: checkpoint outside [0, horizon]");
    }
    if (r <= prev) {
      throw std::invalid_argument("config: checkpoints must be sorted and distinct");
    }
    prev = r;
  }
  if (prune) {
    if (!(prune->offset >= 0.0)) {
      throw std::invalid_argument("config: prune offset must be >= 0");
    }
    if (!(prune->alpha >= 0.0) || prune->alpha >= 0.5) {
      throw std::invalid_argument("config: prune alpha must lie in [0, 1/2)");
    }
  }
}

std::size_t BbmSnapshot::checkpoint_index(double r) const {
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (checkpoints[c] == r) return c;
  }
  throw std::invalid_argument("unknown checkpoint time");
}

double BbmSnapshot::position_at(std::size_t k, double r) const {
  if (r == 0.0) return 0.0;
  const std::uint32_t leaf = leaves[k];
  if (r == horizon) return node_end_position[leaf];
  const std::size_t c = checkpoint_index(r);
  const std::uint32_t node = tree.ancestor_at(leaf, r);
  if (tree.birth_time(node) == r) {
    const std::uint32_t parent = tree.nodes()[node].parent;
    return parent == GenealogyTree::kNoNode ? 0.0 : node_end_position[parent];
  }
  const auto& column = checkpoint_positions[c];
  auto it = std::lower_bound(
      column.begin(), column.end(), node,
      [](const std::pair<std::uint32_t, double>& entry, std::uint32_t v) {
        return entry.first < v;
      });
  if (it == column.end() || it->first != node) {
    throw std::logic_error("checkpoint position missing for ancestor node");
  }
  return it->second;
}

BbmSnapshot simulate(const BbmConfig& config, const StreamKey& key) {
  config.validate();
  BbmSnapshot snap;
  snap.horizon = config.horizon;
  snap.m_t = centering(config.horizon);
  snap.checkpoints = config.checkpoints;
  snap.pruned = config.prune.has_value();

  {
    RandomStream tree_rng = make_stream(key, StreamTag::kTreeEvents);
    snap.tree = sample_tree(config.offspring, config.horizon, tree_rng,
                            config.limits);
  }
  const GenealogyTree& tree = snap.tree;
  const std::size_t node_count = tree.nodes().size();
  snap.node_end_position.assign(node_count, kNaN);
  snap.checkpoint_positions.resize(config.checkpoints.size());

  std::vector<char> killed;
  if (snap.pruned) killed.assign(node_count, 0);

  // First checkpoint strictly inside (0, horizon]; checkpoints at 0 need no
  // realization (every particle starts at the origin).
  std::size_t first_inner = 0;
  while (first_inner < config.checkpoints.size() &&
         config.checkpoints[first_inner] == 0.0) {
    ++first_inner;
  }

  for (std::uint32_t v = 0; v < node_count; ++v) {
    const LineageNode& ln = tree.nodes()[v];
    if (snap.pruned && ln.parent != GenealogyTree::kNoNode &&
        killed[ln.parent]) {
      killed[v] = 1;
      continue;
    }
    const double birth = tree.birth_time(v);
    const double end = tree.end_time(v);
    double x = ln.parent == GenealogyTree::kNoNode
                   ? 0.0
                   : snap.node_end_position[ln.parent];
    RandomStream rng = make_stream(key, StreamTag::kNodeDisplacements, v);
    double prev = birth;
    bool dead = false;
    for (std::size_t c = first_inner; c < config.checkpoints.size(); ++c) {
      const double r = config.checkpoints[c];
      if (r <= birth) continue;
      if (r >= end) break;
      x += rng.normal() * std::sqrt(r - prev);
      prev = r;
      if (snap.pruned && x < config.prune->threshold(r, config.horizon)) {
        killed[v] = 1;
        dead = true;
        break;
      }
      snap.checkpoint_positions[c].emplace_back(v, x);
    }
    if (dead) continue;
    x += rng.normal() * std::sqrt(end - prev);
    if (snap.pruned && x < config.prune->threshold(end, config.horizon)) {
      killed[v] = 1;
      continue;
    }
    snap.node_end_position[v] = x;
  }

  if (snap.pruned) {
    for (std::uint32_t leaf : tree.leaves()) {
      if (!killed[leaf]) snap.leaves.push_back(leaf);
    }
    snap.empty_after_prune = snap.leaves.empty();
  } else {
    snap.leaves = tree.leaves();
  }
  return snap;
}

double max_centered(const BbmSnapshot& snapshot) {
  if (snapshot.leaves.empty()) {
    throw std::invalid_argument("max_centered: empty snapshot");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t leaf : snapshot.leaves) {
    best = std::max(best, snapshot.node_end_position[leaf]);
  }
  return best - snapshot.m_t;
}

std::vector<char> prune_mask(const BbmSnapshot& snapshot,
                             const PruneBarrier& barrier) {
  if (snapshot.pruned) {
    throw std::invalid_argument("prune_mask: snapshot is already pruned");
  }
  const GenealogyTree& tree = snapshot.tree;
  const double t = snapshot.horizon;
  const std::size_t node_count = tree.nodes().size();
  std::vector<char> killed(node_count, 0);
  // Cursor per checkpoint column; nodes are visited in ascending id order,
  // matching the columns' order.
  std::vector<std::size_t> cursor(snapshot.checkpoints.size(), 0);
  for (std::uint32_t v = 0; v < node_count; ++v) {
    const LineageNode& ln = tree.nodes()[v];
    bool dead = ln.parent != GenealogyTree::kNoNode && killed[ln.parent];
    for (std::size_t c = 0; c < snapshot.checkpoints.size(); ++c) {
      const auto& column = snapshot.checkpoint_positions[c];
      while (cursor[c] < column.size() && column[cursor[c]].first < v) {
        ++cursor[c];
      }
      if (cursor[c] < column.size() && column[cursor[c]].first == v) {
        if (!dead && column[cursor[c]].second <
                         barrier.threshold(snapshot.checkpoints[c], t)) {
          dead = true;
        }
      }
    }
    if (!dead && snapshot.node_end_position[v] <
                     barrier.threshold(tree.end_time(v), t)) {
      dead = true;
    }
    killed[v] = dead ? 1 : 0;
  }
  return killed;
}

std::vector<std::uint32_t> surviving_leaves(const BbmSnapshot& snapshot,
                                            const PruneBarrier& barrier) {
  const std::vector<char> killed = prune_mask(snapshot, barrier);
  std::vector<std::uint32_t> out;
  for (std::uint32_t leaf : snapshot.tree.leaves()) {
    if (!killed[leaf]) out.push_back(leaf);
  }
  return out;
}

}  // namespace bbmx
