#pragma once

#include <cstdint>

namespace fbst {

/// SplitMix64 (Steele, Lea & Flood; Vigna's fixed-increment variant).
///
/// state += 0x9E3779B97F4A7C15, then the output is the MurmurHash3-style
/// finalizer of the new state. Simulation streams are derived per chunk with
/// `derive_seed`, so a draw is identified by (seed, chunk, index in chunk).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double strictly inside (0, 1): (top 53 bits + 0.5) / 2^53.
  constexpr double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

 private:
  std::uint64_t state_;
};

/// Seed of stream `stream` under master `seed`: mix(seed + (stream + 1)·γ).
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::uint64_t stream) noexcept {
  return SplitMix64::mix(seed + (stream + 1) * SplitMix64::kGamma);
}

}  // namespace fbst
