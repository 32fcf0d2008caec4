#pragma once

#include <cstdint>
#include <limits>

namespace fragkit {

/// 64-bit finaliser from SplitMix64; a bijective avalanche mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Key of the i-th child (0-based) of the node with key `parent`. Node keys
/// hash the genealogical path, so a node's randomness never depends on the
/// order in which the simulator happens to visit nodes.
constexpr std::uint64_t child_key(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Key of the root node of replicate `replicate` under `master_seed`.
constexpr std::uint64_t root_key(std::uint64_t master_seed, std::uint64_t replicate) noexcept {
  return mix64(mix64(master_seed) + 0x9e3779b97f4a7c15ULL * (replicate + 1));
}

/// Counter-based stream: draw i is mix64(base + (i+1) * golden gamma), i.e.
/// SplitMix64 started at a state derived from the key. Cheap to create, so
/// every node of a genealogy owns its own streams.
class Stream {
 public:
  using result_type = std::uint64_t;

  enum class Purpose : std::uint64_t { lifetime = 1, offspring = 2, generic = 3 };

  explicit Stream(std::uint64_t key, Purpose purpose = Purpose::generic) noexcept
      : state_(mix64(key ^ (static_cast<std::uint64_t>(purpose) * 0xd1b54a32d192ed03ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_left() noexcept { return 1.0 - uniform(); }

  /// Standard exponential.
  double exponential() noexcept;

  /// Poisson(mean) by inversion, in chunks of mean <= 32 for large means.
  std::uint64_t poisson(double mean) noexcept;

  /// Index in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace fragkit
