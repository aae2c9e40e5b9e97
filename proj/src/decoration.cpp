#include "bbmx/decoration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bbmx {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
}

RejectionBudgetError::RejectionBudgetError(std::uint64_t attempts,
                                           double acceptance_estimate)
    : std::runtime_error(
          "rejection budget exhausted after " + std::to_string(attempts) +
          " attempts (empirical acceptance estimate " +
          std::to_string(acceptance_estimate) + ")"),
      attempts_(attempts),
      acceptance_estimate_(acceptance_estimate) {}

ConditionedSample sample_conditioned(double t,
                                     const OffspringDistribution& offspring,
                                     const StreamKey& key,
                                     std::uint64_t max_attempts,
                                     const TreeLimits& limits) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("sample_conditioned: horizon must be > 0");
  }
  if (max_attempts == 0) {
    throw std::invalid_argument("sample_conditioned: need at least one attempt");
  }
  BbmConfig config;
  config.horizon = t;
  config.offspring = offspring;
  config.limits = limits;
  const double level = kSqrt2 * t;
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    const StreamKey attempt_key{
        key.root, key.replica,
        derive_seed({key.salt, static_cast<std::uint64_t>(
                                   StreamTag::kRejectionAttempt),
                     attempt})};
    BbmSnapshot snap = simulate(config, attempt_key);
    if (max_centered(snap) + snap.m_t >= level) {
      return ConditionedSample{std::move(snap), attempt + 1};
    }
  }
  throw RejectionBudgetError(max_attempts, 0.0);
}

DecorationSample decoration_atoms(const BbmSnapshot& snapshot,
                                  std::optional<double> r) {
  if (snapshot.leaves.empty()) {
    throw std::invalid_argument("decoration_atoms: empty snapshot");
  }
  if (r && (*r < 0.0 || *r > snapshot.horizon)) {
    throw std::invalid_argument("decoration_atoms: r outside [0, horizon]");
  }
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < snapshot.particle_count(); ++k) {
    if (snapshot.position(k) > snapshot.position(argmax)) argmax = k;
  }
  const double top = snapshot.position(argmax);
  const std::uint32_t top_leaf = snapshot.leaves[argmax];

  DecorationSample out;
  out.horizon = snapshot.horizon;
  out.truncation_r = r;
  std::vector<std::pair<double, std::uint32_t>> entries;
  for (std::size_t k = 0; k < snapshot.particle_count(); ++k) {
    if (r) {
      const double d = snapshot.tree.overlap_of(snapshot.leaves[k], top_leaf);
      if (!(d >= snapshot.horizon - *r)) continue;
    }
    entries.emplace_back(snapshot.position(k) - top,
                         static_cast<std::uint32_t>(k));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (const auto& [atom, particle] : entries) {
    out.atoms.push_back(atom);
    out.particles.push_back(particle);
  }
  return out;
}

DecorationSample recent_relatives(const BbmSnapshot& snapshot,
                                  const ExtendedPointSample& sample,
                                  const ClusterDecomposition& clusters,
                                  std::size_t cluster_index, double r) {
  if (cluster_index >= clusters.representatives.size()) {
    throw std::invalid_argument("recent_relatives: no such representative");
  }
  if (!(r >= 0.0) || r > snapshot.horizon) {
    throw std::invalid_argument("recent_relatives: r outside [0, horizon]");
  }
  const ExtendedAtom& rep =
      sample.atoms[clusters.representatives[cluster_index]];
  const std::uint32_t rep_leaf = snapshot.leaves[rep.particle];
  const double rep_position = snapshot.position(rep.particle);
  const double split_after = snapshot.horizon - r;

  DecorationSample out;
  out.horizon = snapshot.horizon;
  out.truncation_r = r;
  std::vector<std::pair<double, std::uint32_t>> entries;
  entries.emplace_back(0.0, rep.particle);
  for (std::size_t k = 0; k < snapshot.particle_count(); ++k) {
    if (snapshot.leaves[k] == rep_leaf) continue;
    const double d = snapshot.tree.overlap_of(snapshot.leaves[k], rep_leaf);
    if (d > split_after) {
      entries.emplace_back(snapshot.position(k) - rep_position,
                           static_cast<std::uint32_t>(k));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (const auto& [atom, particle] : entries) {
    out.atoms.push_back(atom);
    out.particles.push_back(particle);
  }
  return out;
}

}  // namespace bbmx
