#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bbmx/offspring.hpp"
#include "bbmx/random.hpp"

namespace bbmx {

// Thrown when a simulation would exceed its configured population cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TreeLimits {
  std::uint64_t max_population = 50'000'000;
};

// Sparse genealogical label: entries (event, child) with child >= 1, ordered
// by event index (1-based, global over the tree's branching times). Zero
// entries are implicit: a particle that sits out an event, or continues as
// child 0 of its own branching, stores nothing for it.
class MultiIndex {
 public:
  struct Entry {
    std::uint32_t event;
    std::uint32_t child;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  MultiIndex() = default;
  explicit MultiIndex(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool is_root() const { return entries_.empty(); }
  // The value at event j (0 when absent).
  std::uint32_t at_event(std::uint32_t event) const;
  std::uint32_t last_event() const {
    return entries_.empty() ? 0 : entries_.back().event;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    return a.entries_ < b.entries_;
  }

 private:
  static bool sorted_positive(const std::vector<Entry>& entries);
  std::vector<Entry> entries_;
};

struct TreeEvent {
  double time;
  std::uint32_t node;         // particle that branches here
  std::uint32_t first_child;  // children occupy ids [first_child, first_child + count)
  std::uint32_t count;        // offspring count l >= 1
};

struct LineageNode {
  std::uint32_t parent;       // kNoNode for the root
  std::uint32_t birth_event;  // 1-based event index; 0 for the root
  std::uint32_t child_index;  // position among siblings at the birth event
  std::uint32_t end_event;    // 1-based event at which the node branches; 0 if alive at horizon
};

// Immutable continuous-time Galton-Watson genealogy over a finite horizon.
// Nodes are particle incarnations between two branching events; leaves are
// the incarnations alive at the horizon. Node ids increase with creation
// time, so a parent id is always smaller than its children's.
class GenealogyTree {
 public:
  static constexpr std::uint32_t kNoNode =
      std::numeric_limits<std::uint32_t>::max();

  double horizon() const { return horizon_; }
  std::size_t event_count() const { return events_.size(); }
  const std::vector<TreeEvent>& events() const { return events_; }
  const std::vector<LineageNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& leaves() const { return leaves_; }

  // Time of the 1-based event j.
  double event_time(std::uint32_t event) const {
    return events_[event - 1].time;
  }
  // W(s): number of events with time <= s.
  std::size_t events_up_to(double s) const;
  // n(s) = 1 + sum of (l_j - 1) over events up to s.
  std::size_t population_at(double s) const;

  double birth_time(std::uint32_t node) const {
    const auto be = nodes_[node].birth_event;
    return be == 0 ? 0.0 : event_time(be);
  }
  double end_time(std::uint32_t node) const {
    const auto ee = nodes_[node].end_event;
    return ee == 0 ? horizon_ : event_time(ee);
  }

  MultiIndex label_of(std::uint32_t node) const;
  // Embedding coordinate of the node's lineage using entries with event time
  // <= up_to. Terms are accumulated in increasing event-time order.
  double embedding_of(std::uint32_t node,
                      double up_to = std::numeric_limits<double>::infinity()) const;
  // The ancestor incarnation alive at time r (r in [0, end_time(node)]).
  std::uint32_t ancestor_at(std::uint32_t node, double r) const;
  // Most recent common ancestor time of two leaves; horizon when a == b.
  double overlap_of(std::uint32_t a, std::uint32_t b) const;

 private:
  friend class TreeBuilder;
  friend GenealogyTree sample_tree(const OffspringDistribution&, double,
                                   RandomStream&, const TreeLimits&);

  double horizon_ = 0.0;
  std::vector<TreeEvent> events_;
  std::vector<LineageNode> nodes_;
  std::vector<std::uint32_t> leaves_;  // ascending node id

  void finalize();
};

// Scripted tree construction for fixtures and replays. Particles are
// addressed by their position in the living list, which evolves exactly like
// the sampler's: a branching particle is replaced by its first child in
// place and the remaining children are appended.
class TreeBuilder {
 public:
  explicit TreeBuilder(double horizon);
  std::size_t living_count() const { return living_.size(); }
  // Branches the living particle at `living_index` at `time` into `count`
  // children. Times must be strictly increasing and within (0, horizon].
  TreeBuilder& branch(double time, std::size_t living_index,
                      std::uint32_t count);
  GenealogyTree build() &&;

 private:
  GenealogyTree tree_;
  std::vector<std::uint32_t> living_;
  double last_time_ = 0.0;
};

// Event-driven exact sampler: every living particle branches at rate 1, so
// after a state with n particles the next event arrives Exp(n) later and hits
// a uniformly chosen particle, which gets an offspring count drawn from dist.
GenealogyTree sample_tree(const OffspringDistribution& dist, double horizon,
                          RandomStream& rng, const TreeLimits& limits = {});

// The label set tau(s), ordered by node id; |tau(s)| = n(s).
std::vector<MultiIndex> labels_at(const GenealogyTree& tree, double s);

// Truncation u(r): drops entries whose event time exceeds r.
MultiIndex ancestor_label(const MultiIndex& u, const GenealogyTree& tree,
                          double r);

// Embedding coordinate sum of entry_child * exp(-t_event) over entries with
// event time <= s, accumulated in increasing time order.
double embed_label(const MultiIndex& u, const GenealogyTree& tree,
                   double s = std::numeric_limits<double>::infinity());

// Most recent common ancestor time: the time of the first event at which the
// two labels disagree, or the horizon when the labels are identical. Labels
// referencing events beyond the tree are rejected.
double overlap_time(const MultiIndex& u, const MultiIndex& v,
                    const GenealogyTree& tree);

}  // namespace bbmx
