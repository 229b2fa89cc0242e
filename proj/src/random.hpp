#pragma once

#include <cstdint>

namespace wetfb {

// Splittable counter-style PRNG after Steele/Lea/Flood "Fast Splittable
// Pseudorandom Number Generators" (the SplittableRandom design): a 64-bit
// state advanced by an odd gamma, output through a variant of the
// splitmix64 finalizer. Value type: streams can be copied and split by
// index, which gives shard-count-reproducible parallel sampling without
// shared mutable state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) noexcept
      : state_(mix64(seed ^ kGoldenGamma)), gamma_(mix_gamma(seed + kGoldenGamma)) {}

  std::uint64_t next_u64() noexcept {
    state_ += gamma_;
    return mix64(state_);
  }

  // Uniform on [0,1), 53-bit resolution.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); safe as a log() argument.
  double next_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Child stream for shard `index`; deterministic in (parent state, index),
  // independent of how many values the parent has produced after the split.
  RngStream split(std::uint64_t index) const noexcept {
    RngStream child(0);
    child.state_ = mix64(state_ ^ mix64(gamma_ + (index + 1) * kGoldenGamma));
    child.gamma_ = mix_gamma(state_ + (index + 1) * kGoldenGamma);
    return child;
  }

 private:
  static constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

  // Stafford "Mix13" finalizer.
  static std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Odd gamma with enough bit transitions (SplittableRandom's mixGamma).
  static std::uint64_t mix_gamma(std::uint64_t z) noexcept {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    z = (z ^ (z >> 33)) | 1ULL;
    int transitions = __builtin_popcountll(z ^ (z >> 1));
    return (transitions < 24) ? z ^ 0xaaaaaaaaaaaaaaaaULL : z;
  }

  std::uint64_t state_;
  std::uint64_t gamma_;
};

}  // namespace wetfb
