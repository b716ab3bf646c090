#pragma once

#include <cstdint>

namespace latgibbs {

/// Counter-based uniform stream. Draw k is a pure function of (key, k), so a
/// run is reproducible from its seed alone, and independent child streams can
/// be derived without sharing mutable state.
class SplitStream {
 public:
  explicit SplitStream(std::uint64_t seed)
      : key_(mix(seed + 0x9E3779B97F4A7C15ULL)) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() {
    return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  /// Child stream determined by (key, index).
  SplitStream split(std::uint64_t index) const {
    SplitStream child(0);
    child.key_ = mix(key_ ^ mix(index + 0xD1B54A32D192ED03ULL));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t draws_consumed() const { return counter_; }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace latgibbs
