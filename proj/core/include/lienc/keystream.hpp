#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lienc {

/// Seeded SplitMix64 cursor. All key material and training randomness in the
/// harness is expanded from one of these, so a seed fixes every draw on every
/// platform. Not cryptographically secure.
///
/// Single owner: a KeyStream may be moved across threads but never shared.
class KeyStream {
 public:
  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;

  explicit KeyStream(std::uint64_t seed) noexcept : state_(seed), origin_seed_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += kIncrement;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Most significant bit of the next draw.
  int next_bit() noexcept { return static_cast<int>(next_u64() >> 63); }

  /// Uniform in [0, m) by rejection; throws InvalidBound for m == 0.
  std::uint64_t next_bounded(std::uint64_t m);

  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one draw pair per call, second discarded).
  double next_normal() noexcept;

  /// Fisher-Yates shuffle of the identity on {0, ..., k-1}.
  std::vector<std::size_t> permutation(std::size_t k);

  std::uint64_t state() const noexcept { return state_; }
  std::uint64_t origin_seed() const noexcept { return origin_seed_; }

 private:
  std::uint64_t state_;
  std::uint64_t origin_seed_;
};

}  // namespace lienc
