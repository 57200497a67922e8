#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cmaml::numkit {

/// Deterministic RNG used everywhere in the project. Wraps mt19937_64 (the
/// engine is fully specified by the standard) and implements its own
/// uniform/normal transforms so that sampled streams are identical across
/// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    // rejection sampling keeps the draw unbiased
    const uint64_t un = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  /// Standard normal via Box-Muller. No cached spare: every call consumes
  /// exactly two uniforms, keeping stream positions easy to reason about.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a path of integers into a single sub-stream seed. Used to give each
/// (task, iteration, purpose) combination an independent deterministic stream.
inline uint64_t mix_seed(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

inline uint64_t stream_seed(uint64_t master, uint64_t a, uint64_t b = 0,
                            uint64_t c = 0) {
  uint64_t h = mix_seed(master, a);
  h = mix_seed(h, b);
  h = mix_seed(h, c);
  return h;
}

}  // namespace cmaml::numkit
