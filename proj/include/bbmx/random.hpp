#pragma once

// Deterministic random streams. A root seed plus a short key of 64-bit words
// (purpose tag, replica index, node id, ...) derives an independent substream,
// so replicas can be simulated in any order, on any number of workers, with
// bit-identical results. All samplers are implemented here rather than taken
// from <random>, which keeps output stable across standard libraries.

#include <cstdint>
#include <initializer_list>
#include <cmath>

namespace bbmx {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (stateless scramble).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Purpose tags folded into the seed derivation so that, e.g., tree shape and
// particle displacements never share a stream.
enum class StreamTag : std::uint64_t {
  kTreeEvents = 1,
  kNodeDisplacements = 2,
  kSpine = 3,
  kRejectionAttempt = 4,
  kScratch = 5,
};

// Folds key words into a single substream seed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ull;
  for (std::uint64_t w : words) h = detail::mix64(h ^ detail::mix64(w));
  return h;
}

// Identifies one replica's randomness: root seed, replica index and a salt
// that separates independent uses of the same replica range (e.g. the two
// sides of a two-sample comparison).
struct StreamKey {
  std::uint64_t root = 0;
  std::uint64_t replica = 0;
  std::uint64_t salt = 0;
};

// xoshiro256++ stream with hand-rolled samplers.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += detail::kGolden;
      word = detail::mix64(sm);
    }
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ull; }

  std::uint64_t operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on (0,1); never returns 0 or 1, so logs are safe.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in {0, ..., n-1} (Lemire multiply-shift).
  std::uint32_t uniform_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Box-Muller pair, second value cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform01()));
    const double angle = 6.283185307179586476925286766559 * uniform01();
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline RandomStream make_stream(const StreamKey& key, StreamTag tag) {
  return RandomStream(derive_seed(
      {key.root, static_cast<std::uint64_t>(tag), key.salt, key.replica}));
}

inline RandomStream make_stream(const StreamKey& key, StreamTag tag,
                                std::uint64_t item) {
  return RandomStream(derive_seed({key.root, static_cast<std::uint64_t>(tag),
                                   key.salt, key.replica, item}));
}

}  // namespace bbmx
