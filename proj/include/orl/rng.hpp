#pragma once

#include <cstdint>
#include <span>

namespace orl {

/**
 * Deterministic 64-bit generator (splitmix64) with explicit substream
 * derivation.  All sampling goes through this class instead of <random>
 * distributions so that draws are bit-identical across platforms and
 * independent of how work is scheduled.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Stream for unit `index` under `seed`; trajectory i must use (seed, i).
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    Rng r(mix(seed + 0x9e3779b97f4a7c15ull * (index + 1)));
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Index sampled from an (unnormalized up to rounding) probability vector
  /// by inverse-CDF scan; ties and trailing rounding mass go to the last
  /// index with positive mass.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double cum = 0.0;
    int last_positive = 0;
    for (int k = 0; k < static_cast<int>(probs.size()); ++k) {
      if (probs[k] > 0.0) last_positive = k;
      cum += probs[k];
      if (u < cum) return k;
    }
    return last_positive;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace orl
