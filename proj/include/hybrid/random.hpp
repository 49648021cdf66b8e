#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hybrid {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Portable random source: std::mt19937_64 (bit-exact across standard
/// libraries) with hand-written distributions, since the standard
/// distribution objects are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent generator for sub-stream `stream` of `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  bool coin() { return (next() >> 63) != 0; }

  /// Box-Muller; one draw per call.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hybrid
