#pragma once

#include <cstdint>
#include <limits>

namespace pilinv {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small counter-based generator. Every (seed, stream, replication, period)
/// tuple maps to its own independent sequence, so common random numbers and
/// parallel replications need no shared state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t replication = 0;

  constexpr std::uint64_t hash() const noexcept {
    std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
    h = mix64(h ^ (stream * 0xd1342543de82ef95ULL + 1));
    h = mix64(h ^ (replication * 0xa0761d6478bd642fULL + 2));
    return h;
  }
};

/// Generator for one period of one replication of one stream.
inline Rng period_rng(const StreamKey& key, std::uint64_t period) noexcept {
  return Rng(mix64(key.hash() ^ mix64(period + 0x2545f4914f6cdd1dULL)));
}

inline Rng period_rng(std::uint64_t key_hash, std::uint64_t period) noexcept {
  return Rng(mix64(key_hash ^ mix64(period + 0x2545f4914f6cdd1dULL)));
}

}  // namespace pilinv
