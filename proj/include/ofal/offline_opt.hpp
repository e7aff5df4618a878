#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "ofal/model.hpp"

namespace ofal {

struct OptResult {
  Rational cost;
  std::vector<ServerIndex> assignment;  // request index -> server index
};

enum class AssignmentOrder {
  lexicographic,  // smallest assignment vector among all optima
  any,            // whatever the flow solver produced
};

/// Minimum-cost capacitated assignment by successive shortest augmenting
/// paths (source -> requests, cap 1; requests -> servers, cost |r - s|;
/// servers -> sink, cap c(s)).
OptResult optimal_cost(const Instance& inst, const RequestSequence& seq,
                       AssignmentOrder order = AssignmentOrder::lexicographic);

/// Exhaustive enumeration of capacity-respecting assignments. Throws when
/// more than 10^7 assignments exist.
OptResult optimal_bruteforce(const Instance& inst, const RequestSequence& seq);

/// Number of capacity-respecting assignments (floating estimate, for guards).
long double feasible_assignment_count(std::span<const int> capacities, std::size_t n);

/// Optimum via dynamic programming over sorted requests, using that some
/// optimal assignment on a line never crosses.
Rational noncrossing_dp_cost(const Instance& inst, const RequestSequence& seq);

/// Core of the noncrossing DP. Requests are indexed 0..n-1 in sorted order
/// and servers 0..k-1 in sorted order; cost(t, j) is the cost of pairing
/// them. Capacities may be zero. Empty result when n exceeds total capacity.
template <class Scalar, class CostFn>
std::optional<Scalar> noncrossing_min_cost(std::size_t n, std::span<const int> capacities, CostFn&& cost) {
  const std::size_t k = capacities.size();
  std::vector<std::optional<Scalar>> current(n + 1);
  std::vector<std::optional<Scalar>> next(n + 1);
  current[0] = Scalar(0);
  for (std::size_t j = 0; j < k; ++j) {
    std::fill(next.begin(), next.end(), std::nullopt);
    const std::size_t cap = static_cast<std::size_t>(std::max(capacities[j], 0));
    for (std::size_t i = 0; i <= n; ++i) {
      Scalar block(0);
      for (std::size_t u = 0; u <= cap && u <= i; ++u) {
        if (u > 0) block += cost(i - u, j);
        const auto& before = current[i - u];
        if (!before) continue;
        Scalar candidate = *before + block;
        if (!next[i] || candidate < *next[i]) next[i] = std::move(candidate);
      }
    }
    std::swap(current, next);
  }
  return current[n];
}

}  // namespace ofal
