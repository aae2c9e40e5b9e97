#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bbmx/bbm.hpp"

using namespace bbmx;

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;

BbmSnapshot fixture_snapshot(std::vector<double> positions, double horizon) {
  TreeBuilder builder(horizon);
  if (positions.size() > 1) {
    builder.branch(horizon / 2, 0,
                   static_cast<std::uint32_t>(positions.size()));
  }
  BbmSnapshot snap;
  snap.tree = std::move(builder).build();
  snap.horizon = horizon;
  snap.m_t = centering(horizon);
  snap.leaves = snap.tree.leaves();
  snap.node_end_position.assign(snap.tree.nodes().size(), 0.0);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    snap.node_end_position[snap.leaves[k]] = positions[k];
  }
  return snap;
}

}  // namespace

TEST_CASE("centering values") {
  CHECK(centering(1.0) == doctest::Approx(kSqrt2).epsilon(1e-14));
  // sqrt(2) * 10 - (3 / (2 sqrt 2)) ln 10 evaluated in extended precision.
  CHECK(centering(10.0) == doctest::Approx(11.699875331).epsilon(1e-9));
  const double t = std::exp(2.0);
  CHECK(centering(t) ==
        doctest::Approx(kSqrt2 * t - 3.0 / kSqrt2).epsilon(1e-14));
  CHECK_THROWS_AS(centering(0.0), std::invalid_argument);
  CHECK_THROWS_AS(centering(-1.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  BbmConfig config;
  config.horizon = 2.0;
  config.checkpoints = {0.5, 1.5};
  config.validate();
  config.checkpoints = {1.5, 0.5};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.checkpoints = {3.0};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.checkpoints.clear();
  config.prune = PruneBarrier{-1.0, 0.0};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.prune = PruneBarrier{1.0, 0.7};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("max_centered on fixtures") {
  const double t = 3.0;
  const double m = centering(t);
  CHECK(max_centered(fixture_snapshot({m}, t)) == 0.0);
  CHECK(max_centered(fixture_snapshot({m + 1.0, m - 2.0}, t)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  BbmSnapshot empty = fixture_snapshot({m}, t);
  empty.leaves.clear();
  CHECK_THROWS_AS(max_centered(empty), std::invalid_argument);
}

TEST_CASE("deterministic replay and replica separation") {
  BbmConfig config;
  config.horizon = 3.0;
  config.checkpoints = {1.0};
  const BbmSnapshot a = simulate(config, {17, 4});
  const BbmSnapshot b = simulate(config, {17, 4});
  REQUIRE(a.leaves == b.leaves);
  REQUIRE(a.node_end_position == b.node_end_position);
  REQUIRE(a.tree.event_count() == b.tree.event_count());
  for (std::size_t j = 0; j < a.tree.event_count(); ++j) {
    REQUIRE(a.tree.events()[j].time == b.tree.events()[j].time);
  }
  const BbmSnapshot c = simulate(config, {17, 5});
  CHECK(a.node_end_position != c.node_end_position);
}

TEST_CASE("single-lineage marginal is Brownian across checkpoints") {
  BbmConfig config;
  config.horizon = 4.0;
  config.checkpoints = {1.0, 2.5};
  const int replicas = 20000;
  std::vector<double> inc1, inc2, inc3;
  for (int i = 0; i < replicas; ++i) {
    const BbmSnapshot snap =
        simulate(config, {555, static_cast<std::uint64_t>(i)});
    const double x1 = snap.position_at(0, 1.0);
    const double x2 = snap.position_at(0, 2.5);
    const double x3 = snap.position(0);
    inc1.push_back(x1);
    inc2.push_back(x2 - x1);
    inc3.push_back(x3 - x2);
  }
  const auto var = [&](const std::vector<double>& v) {
    double sum = 0.0, ss = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / v.size();
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / (v.size() - 1);
  };
  const auto cov = [&](const std::vector<double>& u,
                       const std::vector<double>& v) {
    double mu = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mu += u[i];
      mv += v[i];
    }
    mu /= u.size();
    mv /= v.size();
    double c = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      c += (u[i] - mu) * (v[i] - mv);
    }
    return c / (u.size() - 1);
  };
  // SE of a variance estimate is roughly var * sqrt(2/n).
  const double tol = 3.0 * std::sqrt(2.0 / replicas);
  CHECK(std::abs(var(inc1) - 1.0) < tol * 1.0);
  CHECK(std::abs(var(inc2) - 1.5) < tol * 1.5);
  CHECK(std::abs(var(inc3) - 1.5) < tol * 1.5);
  CHECK(std::abs(cov(inc1, inc2)) < 4.0 * std::sqrt(1.0 * 1.5 / replicas));
  CHECK(std::abs(cov(inc2, inc3)) < 4.0 * std::sqrt(1.5 * 1.5 / replicas));
}

TEST_CASE("population mean matches e^t") {
  BbmConfig config;
  config.horizon = 3.0;
  const int replicas = 5000;
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < replicas; ++i) {
    const double n = static_cast<double>(
        simulate(config, {2222, static_cast<std::uint64_t>(i)})
            .particle_count());
    sum += n;
    ss += n * n;
  }
  const double mean = sum / replicas;
  const double sd = std::sqrt(ss / replicas - mean * mean);
  CHECK(std::abs(mean - std::exp(3.0)) < 3.0 * sd / std::sqrt(replicas));
}

TEST_CASE("siblings share ancestral positions and embeddings") {
  BbmConfig config;
  config.horizon = 3.0;
  config.checkpoints = {0.8, 1.7, 2.6};
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const BbmSnapshot snap = simulate(config, {808, rep});
    const std::size_t n = snap.particle_count();
    if (n < 2) continue;
    for (std::size_t a = 0; a < std::min<std::size_t>(n, 6); ++a) {
      for (std::size_t b = a + 1; b < std::min<std::size_t>(n, 6); ++b) {
        const double d =
            snap.tree.overlap_of(snap.leaves[a], snap.leaves[b]);
        for (double r : config.checkpoints) {
          if (r < d) {
            REQUIRE(snap.position_at(a, r) == snap.position_at(b, r));
            REQUIRE(snap.embedding_at(a, r) == snap.embedding_at(b, r));
          }
        }
      }
    }
    // Embeddings grow along lineages through the checkpoints.
    for (std::size_t k = 0; k < n; ++k) {
      double previous = 0.0;
      for (double r : config.checkpoints) {
        const double value = snap.embedding_at(k, r);
        REQUIRE(value >= previous);
        previous = value;
      }
      REQUIRE(snap.embedding(k) >= previous);
    }
  }
}

TEST_CASE("checkpoint endpoints: zero and horizon") {
  BbmConfig config;
  config.horizon = 2.0;
  config.checkpoints = {0.0, 1.0, 2.0};
  const BbmSnapshot snap = simulate(config, {31, 0});
  for (std::size_t k = 0; k < snap.particle_count(); ++k) {
    CHECK(snap.position_at(k, 0.0) == 0.0);
    CHECK(snap.position_at(k, 2.0) == snap.position(k));
  }
  CHECK_THROWS_AS(snap.checkpoint_index(0.5), std::invalid_argument);
}

TEST_CASE("in-simulation pruning is a bit-exact coupling of the mask") {
  BbmConfig exact;
  exact.horizon = 6.0;
  exact.checkpoints = {2.0, 4.0};
  BbmConfig pruned = exact;
  const PruneBarrier barrier{2.0, 0.0};
  pruned.prune = barrier;

  std::size_t killed_somewhere = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const StreamKey key{99, rep};
    const BbmSnapshot full = simulate(exact, key);
    const BbmSnapshot cut = simulate(pruned, key);
    REQUIRE(cut.pruned);
    const std::vector<std::uint32_t> survivors =
        surviving_leaves(full, barrier);
    REQUIRE(survivors == cut.leaves);
    if (survivors.size() < full.leaves.size()) ++killed_somewhere;
    for (std::uint32_t leaf : survivors) {
      REQUIRE(full.node_end_position[leaf] == cut.node_end_position[leaf]);
    }
  }
  CHECK(killed_somewhere > 0);  // the barrier actually bites at this offset
}

TEST_CASE("a zero-offset barrier can empty the population") {
  BbmConfig config;
  config.horizon = 6.0;
  config.prune = PruneBarrier{0.0, 0.0};
  std::size_t empties = 0;
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    const BbmSnapshot snap = simulate(config, {123456, rep});
    if (snap.empty_after_prune) {
      ++empties;
      CHECK(snap.leaves.empty());
    }
  }
  CHECK(empties > 0);
}

TEST_CASE("prune_mask refuses pruned snapshots") {
  BbmConfig config;
  config.horizon = 2.0;
  config.prune = PruneBarrier{8.0, 0.0};
  const BbmSnapshot snap = simulate(config, {5, 0});
  CHECK_THROWS_AS(prune_mask(snap, *config.prune), std::invalid_argument);
}

TEST_CASE("curved barrier term is active only for positive alpha") {
  const PruneBarrier straight{3.0, 0.0};
  const PruneBarrier curved{3.0, 0.4};
  const double t = 9.0;
  CHECK(straight.threshold(4.5, t) ==
        doctest::Approx((4.5 / t) * centering(t) - 3.0).epsilon(1e-12));
  CHECK(curved.threshold(4.5, t) ==
        doctest::Approx((4.5 / t) * centering(t) - std::pow(4.5, 0.4) - 3.0)
            .epsilon(1e-12));
}
