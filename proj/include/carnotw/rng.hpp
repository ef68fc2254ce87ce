#pragma once

#include <cmath>
#include <cstdint>

#include "carnotw/vec.hpp"

namespace carnotw {

/// Counter-based generator: draw k of stream (seed, stream) is a hash of
/// (key, k). Child streams derived with child() never overlap the parent
/// stream, so reports stay reproducible no matter how sampling work is
/// split up between sub-tasks.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x9E3779B97F4A7C15ull, stream)) {}

  Rng child(std::uint64_t label) const {
    return Rng(mix(key_, label ^ 0xA0761D6478BD642Full), label);
  }

  std::uint64_t next_u64() { return mix(key_, ++counter_); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  double gaussian() {
    // Box-Muller; the first uniform is shifted into (0, 1] so the log is safe.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

  Vec gaussian_vec(std::size_t n) {
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = gaussian();
    return out;
  }

  Vec unit_vector(std::size_t n) {
    for (;;) {
      Vec v = gaussian_vec(n);
      const double nv = euclid_norm(v);
      if (nv > 1e-6) return scaled(v, 1.0 / nv);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 0x632BE59BD9B4E019ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace carnotw
