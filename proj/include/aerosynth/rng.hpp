#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aerosynth {

std::uint64_t splitmix64(std::uint64_t x);

/// Stable 64-bit FNV-1a of a string; used to name RNG streams.
std::uint64_t fnv1a(std::string_view text);

/// Combines a seed with an index (frame number, attempt number, ...).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Seed of the named sub-stream of `seed` ("scene", "color", "weather", "flock", ...).
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream);

/// Seedable generator with bit-exact output across platforms.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard; the
/// standard distributions are not, so the helpers below derive values from raw
/// engine output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream) : engine_(stream_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Uniform integer in [lo, hi] inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool chance(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace aerosynth
