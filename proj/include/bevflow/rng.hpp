#pragma once

#include <cstdint>

namespace bevflow {

/// splitmix64 step (Steele/Lea/Flood constants). Advances `state` and returns
/// the mixed output. Used for seeding and for deriving sub-stream seeds.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Deterministic, portable random generator: xoshiro256** (Blackman/Vigna),
/// state seeded from four successive splitmix64 outputs. The exact update is
///   result = rotl(s1 * 5, 7) * 9
///   t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
///   s3 = rotl(s3, 45)
/// so identically seeded generators produce identical streams on every
/// platform. Derived draws:
///   uniform01 = (next() >> 11) * 2^-53            in [0, 1)
///   normal    = Box-Muller, sqrt(-2 ln u1) cos(2 pi u2) with
///               u1 = ((next() >> 11) + 1) * 2^-53  in (0, 1]
/// (one normal per pair of uniforms; the sine branch is discarded).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform01();
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double sigma);
  /// Integer in [0, n); n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

/// Deterministic seed for a named sub-stream of `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace bevflow
