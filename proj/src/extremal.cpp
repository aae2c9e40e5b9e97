#include "bbmx/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bbmx {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

ExtendedPointSample build_sample(const BbmSnapshot& snapshot,
                                 std::span<const std::uint32_t> particles,
                                 double cutoff,
                                 std::optional<double> embedding_checkpoint) {
  if (embedding_checkpoint) snapshot.checkpoint_index(*embedding_checkpoint);
  ExtendedPointSample sample;
  sample.horizon = snapshot.horizon;
  for (std::uint32_t k : particles) {
    const double value = snapshot.position(k) - snapshot.m_t;
    if (value < cutoff) continue;
    const double gamma = embedding_checkpoint
                             ? snapshot.embedding_at(k, *embedding_checkpoint)
                             : snapshot.embedding(k);
    sample.atoms.push_back({gamma, value, k});
  }
  std::sort(sample.atoms.begin(), sample.atoms.end(),
            [](const ExtendedAtom& a, const ExtendedAtom& b) {
              if (a.value != b.value) return a.value > b.value;
              return a.particle < b.particle;
            });
  const std::size_t n = sample.atoms.size();
  sample.overlap = OverlapMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = snapshot.tree.overlap_of(
          snapshot.leaves[sample.atoms[i].particle],
          snapshot.leaves[sample.atoms[j].particle]);
      sample.overlap.set(i, j, d / snapshot.horizon);
    }
  }
  return sample;
}

}  // namespace

ExtendedPointSample extract(const BbmSnapshot& snapshot, double cutoff,
                            std::optional<double> embedding_checkpoint) {
  if (snapshot.leaves.empty()) {
    throw std::invalid_argument("extract: empty snapshot");
  }
  std::vector<std::uint32_t> all(snapshot.particle_count());
  for (std::size_t k = 0; k < all.size(); ++k) {
    all[k] = static_cast<std::uint32_t>(k);
  }
  return build_sample(snapshot, all, cutoff, embedding_checkpoint);
}

ExtendedPointSample extract_subset(const BbmSnapshot& snapshot,
                                   std::span<const std::uint32_t> particles,
                                   double cutoff,
                                   std::optional<double> embedding_checkpoint) {
  return build_sample(snapshot, particles, cutoff, embedding_checkpoint);
}

ClusterDecomposition thin_by_overlap(const ExtendedPointSample& sample,
                                     double q) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument("thin_by_overlap: q must lie in (0, 1)");
  }
  const std::size_t n = sample.atoms.size();
  ClusterDecomposition out;
  out.q = q;
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cluster = out.representatives.size();
    for (std::size_t c = 0; c < out.representatives.size(); ++c) {
      if (sample.overlap.at(i, out.representatives[c]) >= q) {
        cluster = c;
        break;
      }
    }
    if (cluster == out.representatives.size()) {
      out.representatives.push_back(static_cast<std::uint32_t>(i));
      out.relative_offsets.emplace_back();
    }
    out.assignment[i] = static_cast<std::uint32_t>(cluster);
    out.relative_offsets[cluster].push_back(
        sample.atoms[i].value -
        sample.atoms[out.representatives[cluster]].value);
  }
  return out;
}

std::vector<double> thinned_representation_sample(
    double r_d, double t, const OffspringDistribution& offspring,
    const StreamKey& key, const TreeLimits& limits) {
  if (!(r_d > 0.0) || !(r_d < t)) {
    throw std::invalid_argument(
        "thinned_representation_sample: need 0 < r_d < t");
  }
  const double shift = centering(t) - centering(t - r_d) - kSqrt2 * r_d;

  BbmConfig trunk_config;
  trunk_config.horizon = r_d;
  trunk_config.offspring = offspring;
  trunk_config.limits = limits;
  const StreamKey trunk_key{key.root, key.replica,
                            derive_seed({key.salt, 0x7472756ell})};
  const BbmSnapshot trunk = simulate(trunk_config, trunk_key);

  BbmConfig branch_config;
  branch_config.horizon = t - r_d;
  branch_config.offspring = offspring;
  branch_config.limits = limits;

  std::vector<double> atoms;
  atoms.reserve(trunk.particle_count());
  for (std::size_t j = 0; j < trunk.particle_count(); ++j) {
    const StreamKey branch_key{key.root, key.replica,
                               derive_seed({key.salt, 0x62726e63ull, j})};
    const BbmSnapshot branch = simulate(branch_config, branch_key);
    atoms.push_back(trunk.position(j) - kSqrt2 * r_d + max_centered(branch) -
                    shift);
  }
  std::sort(atoms.begin(), atoms.end(), std::greater<>());
  return atoms;
}

}  // namespace bbmx
