#pragma once

#include <cstdint>
#include <random>

#include "ofal/rational.hpp"

namespace ofal {

/// Seeded generator with bounded draws computed from raw engine output, so
/// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = next();
    while (draw >= limit) draw = next();
    return lo + static_cast<std::int64_t>(draw % span);
  }

  std::size_t index(std::size_t size) { return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(size) - 1)); }

  bool chance(int numerator, int denominator) { return uniform_int(0, denominator - 1) < numerator; }

  /// Uniform on the grid {lo + (hi-lo) i / steps : i = 0..steps}.
  Rational uniform_rational(const Rational& lo, const Rational& hi, std::int64_t steps) {
    return lo + (hi - lo) * ratio(uniform_int(0, steps), steps);
  }

  /// Child seed for trial-level reproducers.
  std::uint64_t split() { return next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ofal
