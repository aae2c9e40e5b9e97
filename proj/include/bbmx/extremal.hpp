#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bbmx/bbm.hpp"

namespace bbmx {

struct ExtendedAtom {
  double embedding = 0.0;  // gamma coordinate of the particle's lineage
  double value = 0.0;      // x - m(t)
  std::uint32_t particle = 0;  // index into snapshot.leaves
};

// Symmetric matrix of normalized overlaps d(u_i, u_j) / t with unit diagonal.
class OverlapMatrix {
 public:
  OverlapMatrix() = default;
  explicit OverlapMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) data_[i * n + i] = 1.0;
  }
  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value) {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Atoms (embedding, x - m(t)) above a cutoff, sorted by value descending
// (ties broken by particle id), with their pairwise overlap matrix.
struct ExtendedPointSample {
  std::vector<ExtendedAtom> atoms;
  OverlapMatrix overlap;
  double horizon = 0.0;
};

// All particles with x(t) - m(t) >= cutoff. The embedding coordinate is taken
// at the horizon by default, or truncated at `embedding_checkpoint` (which
// must be a declared checkpoint of the snapshot).
ExtendedPointSample extract(const BbmSnapshot& snapshot, double cutoff,
                            std::optional<double> embedding_checkpoint = {});

// Same, restricted to a subset of particles (indices into snapshot.leaves).
ExtendedPointSample extract_subset(const BbmSnapshot& snapshot,
                                   std::span<const std::uint32_t> particles,
                                   double cutoff,
                                   std::optional<double> embedding_checkpoint = {});

struct ClusterDecomposition {
  double q = 0.0;
  std::vector<std::uint32_t> representatives;  // atom indices, ascending
  std::vector<std::uint32_t> assignment;       // atom index -> cluster ordinal
  // Per cluster: member values minus the representative value, members in
  // atom order (representative first, offset 0).
  std::vector<std::vector<double>> relative_offsets;
};

// Partition of the atoms into the equivalence classes of {overlap >= q}
// (transitive by ultrametricity), each represented by its maximal atom. A
// single sorted scan reproduces the greedy recursion exactly: an atom joins
// the first representative it overlaps at level >= q, else it opens a new
// cluster.
ClusterDecomposition thin_by_overlap(const ExtendedPointSample& sample,
                                     double q);

// Atoms of the distributional representation of the thinned process at
// q = r_d / t: one trunk of length r_d plus an independent centered subtree
// maximum per trunk particle,
//   x_j(r_d) - sqrt(2) r_d + M_j(t - r_d) - R_t,
// with R_t = m(t) - m(t - r_d) - sqrt(2) r_d. Sorted descending.
std::vector<double> thinned_representation_sample(
    double r_d, double t, const OffspringDistribution& offspring,
    const StreamKey& key, const TreeLimits& limits = {});

}  // namespace bbmx
