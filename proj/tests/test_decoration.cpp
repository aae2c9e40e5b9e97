#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bbmx/decoration.hpp"

using namespace bbmx;

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
const OffspringDistribution kBinary = OffspringDistribution::binary();
}  // namespace

TEST_CASE("accepted samples satisfy the conditioning predicate") {
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const ConditionedSample sample =
        sample_conditioned(3.0, kBinary, {21, rep}, 100000);
    CHECK(sample.attempts >= 1);
    CHECK(max_centered(sample.snapshot) + sample.snapshot.m_t >=
          kSqrt2 * 3.0);
  }
}

TEST_CASE("exhausted budgets raise an error carrying the attempt count") {
  bool saw_failure = false;
  for (std::uint64_t rep = 0; rep < 30 && !saw_failure; ++rep) {
    try {
      sample_conditioned(6.0, kBinary, {1234, rep}, 1);
    } catch (const RejectionBudgetError& err) {
      saw_failure = true;
      CHECK(err.attempts() == 1);
      CHECK(err.acceptance_estimate() == 0.0);
    }
  }
  CHECK(saw_failure);
}

TEST_CASE("decoration atoms are anchored at zero and sorted") {
  const ConditionedSample conditioned =
      sample_conditioned(4.0, kBinary, {77, 0}, 100000);
  const BbmSnapshot& snap = conditioned.snapshot;

  const DecorationSample full = decoration_atoms(snap);
  REQUIRE(full.atoms.size() == snap.particle_count());
  CHECK(full.atoms.front() == 0.0);
  for (std::size_t i = 0; i < full.atoms.size(); ++i) {
    REQUIRE(full.atoms[i] <= 0.0);
    if (i > 0) REQUIRE(full.atoms[i - 1] >= full.atoms[i]);
  }

  // r = 0 keeps only the maximal lineage itself.
  const DecorationSample none = decoration_atoms(snap, 0.0);
  REQUIRE(none.atoms == std::vector<double>{0.0});

  // Truncations are nested and grow with r.
  std::vector<std::uint32_t> previous;
  for (double r : {0.5, 1.5, 3.0, 4.0}) {
    const DecorationSample part = decoration_atoms(snap, r);
    std::vector<std::uint32_t> ids(part.particles);
    std::sort(ids.begin(), ids.end());
    std::vector<std::uint32_t> full_ids(full.particles);
    std::sort(full_ids.begin(), full_ids.end());
    REQUIRE(std::includes(full_ids.begin(), full_ids.end(), ids.begin(),
                          ids.end()));
    REQUIRE(ids.size() >= previous.size());
    REQUIRE(std::includes(ids.begin(), ids.end(), previous.begin(),
                          previous.end()));
    previous = std::move(ids);
  }
  // The untruncated set is recovered at r = t.
  CHECK(previous.size() == full.atoms.size());

  CHECK_THROWS_AS(decoration_atoms(snap, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(decoration_atoms(snap, 9.0), std::invalid_argument);
}

TEST_CASE("recent relatives of a cluster maximum stay below it") {
  const double t = 3.0;
  const double q = 0.25;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const ConditionedSample conditioned =
        sample_conditioned(t, kBinary, {55, rep}, 100000);
    const BbmSnapshot& snap = conditioned.snapshot;
    const ExtendedPointSample sample = extract(snap, -1e300);
    const ClusterDecomposition clusters = thin_by_overlap(sample, q);
    // r below t - q t, so relatives remain inside the representative's class.
    const double r = 0.5;
    for (std::size_t c = 0; c < clusters.representatives.size(); ++c) {
      const DecorationSample rel =
          recent_relatives(snap, sample, clusters, c, r);
      REQUIRE(!rel.atoms.empty());
      CHECK(rel.atoms.front() == 0.0);
      for (double atom : rel.atoms) CHECK(atom <= 0.0);
    }
    CHECK_THROWS_AS(
        recent_relatives(snap, sample, clusters,
                         clusters.representatives.size(), 0.5),
        std::invalid_argument);
  }
}

TEST_CASE("vanishing truncation age leaves only the representative") {
  const ConditionedSample conditioned =
      sample_conditioned(3.0, kBinary, {91, 3}, 100000);
  const BbmSnapshot& snap = conditioned.snapshot;
  const ExtendedPointSample sample = extract(snap, -1e300);
  const ClusterDecomposition clusters = thin_by_overlap(sample, 0.25);
  const DecorationSample rel =
      recent_relatives(snap, sample, clusters, 0, 0.0);
  CHECK(rel.atoms == std::vector<double>{0.0});
}
