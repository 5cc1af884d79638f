#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace exset {

/// Deterministic random number source.
///
/// Wraps std::mt19937_64 (whose output sequence is pinned by the standard)
/// and maps raw bits to doubles explicitly, so streams are bit-reproducible
/// across compilers and standard libraries. std::uniform_real_distribution
/// and std::normal_distribution are implementation-defined and deliberately
/// not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; never returns 0 (safe as a log() argument).
  double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  std::uint64_t bits() { return engine_(); }

  /// Derive an independent child seed, e.g. one per repetition or
  /// realization, so results do not depend on thread scheduling.
  static std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace exset
