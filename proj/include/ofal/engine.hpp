#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ofal/model.hpp"

namespace ofal {

/// An online decision procedure: given the request position and the current
/// free set, name the server to use. MPFS rules additionally pick the top of
/// a position-dependent total order; see derive_priority_order.
struct PriorityRule {
  std::string id;
  std::size_t server_count = 0;
  std::function<ServerIndex(const Rational& request, const ServerSet& free)> decide;

  ServerIndex operator()(const Rational& request, const ServerSet& free) const { return decide(request, free); }
};

/// Forces the match of one step, as the hybrid algorithm does.
struct Deviation {
  std::size_t step = 0;
  ServerIndex server = 0;
};

/// Runs the rule over the sequence with per-run capacity bookkeeping.
/// Throws if the rule answers with a server that is not free.
AssignmentTrace simulate(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq);

/// Same loop over raw positions (which may repeat, for unit replicas) and an
/// optional forced step.
AssignmentTrace simulate_on(const PriorityRule& rule, std::span<const Rational> positions,
                            std::span<const int> capacities, const RequestSequence& seq,
                            std::optional<Deviation> deviation = std::nullopt);

/// Closest free server on each side. When the request sits on a free
/// server both sides name it (lowest index among coinciding replicas).
struct Surrounding {
  std::optional<ServerIndex> left;
  std::optional<ServerIndex> right;
};

Surrounding surrounding_servers(const Rational& request, const ServerSet& free, std::span<const Rational> positions);

inline Surrounding surrounding_servers(const Rational& request, const ServerSet& free, const ServerLayout& layout) {
  return surrounding_servers(request, free, layout.positions());
}

/// True if server j sits at the position of one of the surrounding servers.
bool is_surrounding(ServerIndex j, const Surrounding& s, std::span<const Rational> positions);

struct PriorityOrder {
  std::vector<ServerIndex> order;  // highest priority first
  bool consistent = true;
  std::optional<ServerSet> counterexample;
  std::size_t subsets_checked = 0;
};

/// Ranks servers by repeatedly asking the rule with the not-yet-ranked set,
/// then checks that the rule picks the order-maximum of other free sets:
/// every non-empty subset when k <= 12, otherwise `samples` random ones.
PriorityOrder derive_priority_order(const PriorityRule& rule, const Rational& request, std::uint64_t seed = 1,
                                    std::size_t samples = 1000);

}  // namespace ofal
