#pragma once

#include <cstdint>

namespace bellspin {

/// SplitMix64 generator. Output is fixed by the seed on every platform,
/// which keeps sweeps and scans bit-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Seed of an independent substream keyed by (seed, a, b).
inline std::uint64_t substreamSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (a + 1)));
  g.next();
  SplitMix64 h(g.next() ^ (0x8CB92BA72F3D8DD7ULL * (b + 1)));
  return h.next();
}

}  // namespace bellspin
