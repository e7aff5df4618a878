#pragma once

#include <span>
#include <vector>

#include "ofal/model.hpp"

namespace ofal {

/// L(T) and alpha(S) together with the subset realizing alpha.
struct Metrics {
  Rational l_value;  // L of the whole set
  Rational alpha;
  std::vector<ServerIndex> witness;  // sorted indices into the layout
};

/// Span over largest adjacent gap of sorted points; 0 for fewer than two.
Rational gap_ratio(std::span<const Rational> sorted_points);

/// Maximum of gap_ratio over all 2^k subsets. Enumeration guard: k <= 20.
Metrics alpha_bruteforce(const ServerLayout& layout);

/// Same value, maximizing only over contiguous index intervals [i..j].
/// The witness is the lexicographically smallest maximizing interval.
Metrics alpha_fast(const ServerLayout& layout);

/// Diameter over smallest adjacent gap; 0 for a single server.
Rational aspect_ratio(const ServerLayout& layout);

/// 2 alpha(S) + 1.
Rational ptcp_bound(const ServerLayout& layout);

}  // namespace ofal
