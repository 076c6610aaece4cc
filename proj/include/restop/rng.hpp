#pragma once

#include <cmath>
#include <cstdint>

namespace restop {

// splitmix64: tiny counter-friendly generator with a well-mixed output
// stage. Used directly for utility draws and as the per-path stream
// derivation for Monte Carlo (bit-identical regardless of threading).
struct SplitMix64 {
  std::uint64_t s;

  explicit SplitMix64(std::uint64_t seed) : s(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0, 1): never returns 0 or 1, so logs
  // and inverse CDFs are safe.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
};

// Independent stream for one path: both halves of a 128-bit mix of
// (master seed, path index) fold into the starting state.
inline SplitMix64 path_stream(std::uint64_t master_seed,
                              std::uint64_t path_index) {
  SplitMix64 outer(master_seed);
  const std::uint64_t k1 = outer.next();
  const std::uint64_t k2 = outer.next();
  SplitMix64 mixer(k1 ^ (path_index * 0xD1B54A32D192ED03ULL));
  return SplitMix64(mixer.next() ^ k2);
}

// Uniform and standard-normal draws for one path. Box-Muller keeps the
// normal sequence identical across platforms (std::normal_distribution
// is implementation-defined).
struct PathRng {
  SplitMix64 sm;
  double cached = 0.0;
  bool have_cached = false;

  explicit PathRng(SplitMix64 stream) : sm(stream) {}
  PathRng(std::uint64_t master_seed, std::uint64_t path_index)
      : sm(path_stream(master_seed, path_index)) {}

  double uniform() { return sm.uniform(); }

  double normal() {
    if (have_cached) {
      have_cached = false;
      return cached;
    }
    const double u1 = sm.uniform();
    const double u2 = sm.uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    cached = rad * std::sin(ang);
    have_cached = true;
    return rad * std::cos(ang);
  }
};

}  // namespace restop
