#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace latrec {

/// Seedable random stream with a portable output sequence.
///
/// The raw engine is std::mt19937_64, whose output is fixed by the standard.
/// Bounded integers and reals are derived here rather than through the
/// <random> distributions, whose algorithms are implementation-defined.
///
/// Stream splitting: `Rng::stream(seed, {a, b, ...})` seeds a fresh engine with
/// splitmix64 folded over the seed and each tag in order. Every pipeline stage
/// (lattice search, stage-1 draws, continuous baseline points, ...) uses its
/// own tag tuple, so adding a stage never perturbs the draws of another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace latrec
