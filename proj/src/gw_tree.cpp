#include "bbmx/gw_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bbmx {

bool MultiIndex::sorted_positive(const std::vector<Entry>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].child == 0 || entries[i].event == 0) return false;
    if (i > 0 && entries[i - 1].event >= entries[i].event) return false;
  }
  return true;
}

MultiIndex::MultiIndex(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (!sorted_positive(entries_)) {
    throw std::invalid_argument(
        "multi-index entries must be event-sorted with positive child values");
  }
}

std::uint32_t MultiIndex::at_event(std::uint32_t event) const {
  for (const auto& e : entries_) {
    if (e.event == event) return e.child;
    if (e.event > event) break;
  }
  return 0;
}

void GenealogyTree::finalize() {
  leaves_.clear();
  for (std::uint32_t v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].end_event == 0) leaves_.push_back(v);
  }
}

std::size_t GenealogyTree::events_up_to(double s) const {
  auto it = std::upper_bound(
      events_.begin(), events_.end(), s,
      [](double value, const TreeEvent& ev) { return value < ev.time; });
  return static_cast<std::size_t>(it - events_.begin());
}

std::size_t GenealogyTree::population_at(double s) const {
  const std::size_t w = events_up_to(s);
  std::size_t n = 1;
  for (std::size_t j = 0; j < w; ++j) n += events_[j].count - 1;
  return n;
}

MultiIndex GenealogyTree::label_of(std::uint32_t node) const {
  std::vector<MultiIndex::Entry> entries;
  for (std::uint32_t v = node; v != kNoNode; v = nodes_[v].parent) {
    if (nodes_[v].child_index >= 1) {
      entries.push_back({nodes_[v].birth_event, nodes_[v].child_index});
    }
  }
  std::reverse(entries.begin(), entries.end());
  return MultiIndex(std::move(entries));
}

double GenealogyTree::embedding_of(std::uint32_t node, double up_to) const {
  // Chain walk yields entries in decreasing time; buffer and add back-to-front
  // so the largest terms are accumulated first.
  double terms[64];
  std::vector<double> spill;
  std::size_t count = 0;
  for (std::uint32_t v = node; v != kNoNode; v = nodes_[v].parent) {
    const auto& ln = nodes_[v];
    if (ln.child_index >= 1) {
      const double tj = event_time(ln.birth_event);
      if (tj <= up_to) {
        const double term = ln.child_index * std::exp(-tj);
        if (count < 64) {
          terms[count++] = term;
        } else {
          spill.push_back(term);
        }
      }
    }
  }
  double sum = 0.0;
  for (std::size_t i = count; i-- > 0;) sum += terms[i];
  for (std::size_t i = 0; i < spill.size(); ++i) sum += spill[i];
  return sum;
}

std::uint32_t GenealogyTree::ancestor_at(std::uint32_t node, double r) const {
  // A node covers [birth, end); a leaf covers [birth, horizon].
  std::uint32_t v = node;
  while (nodes_[v].parent != kNoNode && birth_time(v) > r) v = nodes_[v].parent;
  return v;
}

double GenealogyTree::overlap_of(std::uint32_t a, std::uint32_t b) const {
  if (a == b) return horizon_;
  // Mark a's ancestry, walk b upward to the first marked node. Chains are
  // short (rate-1 branching along a lineage), so a linear scan is fine.
  thread_local std::vector<std::uint32_t> chain;
  chain.clear();
  for (std::uint32_t v = a; v != kNoNode; v = nodes_[v].parent) chain.push_back(v);
  for (std::uint32_t v = b; v != kNoNode; v = nodes_[v].parent) {
    for (std::uint32_t u : chain) {
      if (u == v) {
        // The lowest common incarnation's branching event is where the two
        // lineages diverge.
        const auto ee = nodes_[v].end_event;
        return ee == 0 ? horizon_ : event_time(ee);
      }
    }
  }
  throw std::logic_error("overlap_of: nodes do not share a root");
}

TreeBuilder::TreeBuilder(double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("tree horizon must be finite and >= 0");
  }
  tree_.horizon_ = horizon;
  tree_.nodes_.push_back({GenealogyTree::kNoNode, 0, 0, 0});
  living_.push_back(0);
}

TreeBuilder& TreeBuilder::branch(double time, std::size_t living_index,
                                 std::uint32_t count) {
  if (!(time > last_time_) || time > tree_.horizon_) {
    throw std::invalid_argument(
        "tree events must have strictly increasing times within the horizon");
  }
  if (living_index >= living_.size()) {
    throw std::invalid_argument("living index out of range");
  }
  if (count < 1) throw std::invalid_argument("offspring count must be >= 1");
  const std::uint32_t node = living_[living_index];
  const auto event = static_cast<std::uint32_t>(tree_.events_.size() + 1);
  const auto first_child = static_cast<std::uint32_t>(tree_.nodes_.size());
  tree_.events_.push_back({time, node, first_child, count});
  tree_.nodes_[node].end_event = event;
  for (std::uint32_t c = 0; c < count; ++c) {
    tree_.nodes_.push_back({node, event, c, 0});
  }
  living_[living_index] = first_child;
  for (std::uint32_t c = 1; c < count; ++c) living_.push_back(first_child + c);
  last_time_ = time;
  return *this;
}

GenealogyTree TreeBuilder::build() && {
  tree_.finalize();
  return std::move(tree_);
}

GenealogyTree sample_tree(const OffspringDistribution& dist, double horizon,
                          RandomStream& rng, const TreeLimits& limits) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("sample_tree: horizon must be finite and > 0");
  }
  GenealogyTree tree;
  tree.horizon_ = horizon;
  tree.nodes_.push_back({GenealogyTree::kNoNode, 0, 0, 0});
  std::vector<std::uint32_t> living{0};
  double t = 0.0;
  for (;;) {
    const auto n = static_cast<std::uint32_t>(living.size());
    double t_next = t + rng.exponential(static_cast<double>(n));
    while (t_next <= t) t_next = t + rng.exponential(static_cast<double>(n));
    if (t_next > horizon) break;
    const std::uint32_t pick = rng.uniform_below(n);
    const std::uint32_t count = dist.sample(rng);
    if (living.size() + count - 1 > limits.max_population) {
      throw ResourceLimitError(
          "population cap exceeded: " + std::to_string(living.size()) +
          " particles at t = " + std::to_string(t_next) + ", cap " +
          std::to_string(limits.max_population));
    }
    const std::uint32_t node = living[pick];
    const auto event = static_cast<std::uint32_t>(tree.events_.size() + 1);
    const auto first_child = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.events_.push_back({t_next, node, first_child, count});
    tree.nodes_[node].end_event = event;
    for (std::uint32_t c = 0; c < count; ++c) {
      tree.nodes_.push_back({node, event, c, 0});
    }
    living[pick] = first_child;
    for (std::uint32_t c = 1; c < count; ++c) living.push_back(first_child + c);
    t = t_next;
  }
  tree.finalize();
  return tree;
}

std::vector<MultiIndex> labels_at(const GenealogyTree& tree, double s) {
  if (!(s >= 0.0) || s > tree.horizon()) {
    throw std::invalid_argument("labels_at: time outside [0, horizon]");
  }
  const std::size_t w = tree.events_up_to(s);
  std::vector<std::uint32_t> living{0};
  std::vector<std::uint32_t> slot_of(tree.nodes().size(), 0);
  for (std::size_t j = 0; j < w; ++j) {
    const TreeEvent& ev = tree.events()[j];
    const std::uint32_t slot = slot_of[ev.node];
    living[slot] = ev.first_child;
    slot_of[ev.first_child] = slot;
    for (std::uint32_t c = 1; c < ev.count; ++c) {
      slot_of[ev.first_child + c] = static_cast<std::uint32_t>(living.size());
      living.push_back(ev.first_child + c);
    }
  }
  std::sort(living.begin(), living.end());
  std::vector<MultiIndex> labels;
  labels.reserve(living.size());
  for (std::uint32_t v : living) labels.push_back(tree.label_of(v));
  return labels;
}

MultiIndex ancestor_label(const MultiIndex& u, const GenealogyTree& tree,
                          double r) {
  std::vector<MultiIndex::Entry> kept;
  for (const auto& e : u.entries()) {
    if (tree.event_time(e.event) <= r) kept.push_back(e);
  }
  return MultiIndex(std::move(kept));
}

double embed_label(const MultiIndex& u, const GenealogyTree& tree, double s) {
  double sum = 0.0;
  for (const auto& e : u.entries()) {
    const double tj = tree.event_time(e.event);
    if (tj > s) break;
    sum += e.child * std::exp(-tj);
  }
  return sum;
}

double overlap_time(const MultiIndex& u, const MultiIndex& v,
                    const GenealogyTree& tree) {
  const auto events = static_cast<std::uint32_t>(tree.event_count());
  if (u.last_event() > events || v.last_event() > events) {
    throw std::invalid_argument(
        "overlap_time: label references an event beyond this tree");
  }
  const auto& a = u.entries();
  const auto& b = v.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i].event == b[j].event) {
      if (a[i].child != b[j].child) return tree.event_time(a[i].event);
      ++i;
      ++j;
    } else if (j >= b.size() || (i < a.size() && a[i].event < b[j].event)) {
      return tree.event_time(a[i].event);  // entry vs implicit zero
    } else {
      return tree.event_time(b[j].event);
    }
  }
  return tree.horizon();
}

}  // namespace bbmx
