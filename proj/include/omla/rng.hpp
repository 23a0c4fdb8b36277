#pragma once

// Randomness plumbing. Everything random in the library flows from a single
// 64-bit seed; nothing reads wall-clock entropy.
//
// Rng        sequential generator (std::mt19937_64) for instance generation;
//            bits are mapped to doubles by hand so results do not depend on
//            the standard library's distribution implementations.
// RandomStream  counter-based substreams for simulation: the draw for
//            (seed, episode, purpose, counter) is a pure function of those
//            four values, independent of call order or thread schedule.

#include <cstdint>
#include <random>

namespace omla {

inline double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return unit_from_bits(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do r = engine_();
    while (r >= limit);
    return lo + static_cast<int>(r % span);
  }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

enum class Purpose : std::uint64_t { arrival = 1, accept = 2, delay = 3, policy = 4 };

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t episode, Purpose purpose)
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ episode) ^ static_cast<std::uint64_t>(purpose))) {}

  /// Uniform on [0, 1) for the given counter (the time slot, in the simulator).
  double at(std::uint64_t counter) const { return unit_from_bits(splitmix64(key_ ^ splitmix64(counter))); }

 private:
  std::uint64_t key_;
};

}  // namespace omla
