#pragma once

#include <cstdint>

namespace semidev {

// Counter-derived SplitMix64 stream. Each (seed, stream) pair yields an
// independent deterministic sequence, so batched Monte Carlo work can be
// partitioned without coordination between workers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)) ^
               mix(stream + 0x6A09E667F3BCC909ULL)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform draw on the open interval (0,1); never returns 0 or 1, so
  // logarithms of either u or 1-u are safe.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace semidev
