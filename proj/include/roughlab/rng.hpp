#ifndef ROUGHLAB_RNG_HPP
#define ROUGHLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace roughlab {

/// Seedable stream of standard normals and uniforms.
///
/// A stream is identified by (master seed, stream index). Distinct indices
/// give statistically independent generators; the same pair always replays
/// the same sequence, independent of any other stream. The generator is a
/// std::mt19937_64 (bit-exact per the C++ standard) seeded through two
/// splitmix64 steps, and normals come from an explicit Box-Muller transform,
/// so the whole pipeline is pinned down and not left to the standard
/// library's unspecified distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; one spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;        // [0,1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0xB5AD4ECEDA1CE2A9ull * (stream + 1));
    std::uint64_t a = splitmix64(state);
    std::uint64_t b = splitmix64(state);
    return a ^ (b << 1);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace roughlab

#endif  // ROUGHLAB_RNG_HPP
