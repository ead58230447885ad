#pragma once

#include <cstdint>

namespace rfcw {

/// SplitMix64 used in counter mode: draw i of key k is mix(k + (i + 1) * 0x9E3779B97F4A7C15).
///
/// Every draw is a pure function of (key, counter), so streams can be split
/// across threads or regenerated piecewise without changing a single bit.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits_at(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGolden);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(bits_at(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by 128-bit multiply-shift.
  constexpr std::uint64_t below_at(std::uint64_t counter, std::uint64_t bound) const {
    __extension__ using u128 = unsigned __int128;
    const u128 prod = static_cast<u128>(bits_at(counter)) * static_cast<u128>(bound);
    return static_cast<std::uint64_t>(prod >> 64);
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Key for an independent substream `stream` of a user seed.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
  return CounterRng::mix(CounterRng::mix(seed ^ 0x5DEECE66DULL) + stream * CounterRng::kGolden);
}

}  // namespace rfcw
