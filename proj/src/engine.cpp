#include "ofal/engine.hpp"

#include "ofal/random.hpp"

namespace ofal {

AssignmentTrace simulate(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq) {
  return simulate_on(rule, inst.layout().positions(), inst.capacities(), seq);
}

AssignmentTrace simulate_on(const PriorityRule& rule, std::span<const Rational> positions,
                            std::span<const int> capacities, const RequestSequence& seq,
                            std::optional<Deviation> deviation) {
  const std::size_t k = positions.size();
  if (rule.server_count != k) {
    throw Error("rule '" + rule.id + "' built for " + std::to_string(rule.server_count) + " servers, instance has " +
                std::to_string(k));
  }
  long long total = 0;
  for (int c : capacities) total += c;
  if (static_cast<long long>(seq.size()) > total) {
    throw Error(std::to_string(seq.size()) + " requests exceed total capacity " + std::to_string(total));
  }

  AssignmentTrace trace;
  trace.total_cost = 0;
  std::vector<int> remaining(capacities.begin(), capacities.end());
  ServerSet free(k);
  for (ServerIndex j = 0; j < k; ++j) {
    if (remaining[j] > 0) free.insert(j);
  }
  trace.residual.push_back(remaining);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    ServerIndex j = (deviation && deviation->step == t) ? deviation->server : rule(seq[t], free);
    if (!free.contains(j)) {
      throw Error("rule '" + rule.id + "' chose server " + std::to_string(j) + " which is not free at step " +
                  std::to_string(t));
    }
    if (--remaining[j] == 0) free.erase(j);
    Rational cost = distance(seq[t], positions[j]);
    trace.total_cost += cost;
    trace.step_cost.push_back(std::move(cost));
    trace.assignment.push_back(j);
    trace.residual.push_back(remaining);
  }
  return trace;
}

Surrounding surrounding_servers(const Rational& request, const ServerSet& free, std::span<const Rational> positions) {
  Surrounding s;
  for (ServerIndex j = 0; j < positions.size(); ++j) {
    if (!free.contains(j)) continue;
    const Rational& p = positions[j];
    if (p == request) {
      return Surrounding{j, j};
    }
    if (p < request) {
      if (!s.left || positions[*s.left] < p) s.left = j;
    } else {
      if (!s.right || p < positions[*s.right]) s.right = j;
    }
  }
  return s;
}

bool is_surrounding(ServerIndex j, const Surrounding& s, std::span<const Rational> positions) {
  return (s.left && positions[*s.left] == positions[j]) || (s.right && positions[*s.right] == positions[j]);
}

namespace {

ServerIndex order_max(const std::vector<ServerIndex>& order, const ServerSet& subset) {
  for (ServerIndex j : order) {
    if (subset.contains(j)) return j;
  }
  return order.front();
}

}  // namespace

PriorityOrder derive_priority_order(const PriorityRule& rule, const Rational& request, std::uint64_t seed,
                                    std::size_t samples) {
  const std::size_t k = rule.server_count;
  PriorityOrder result;
  ServerSet unranked = ServerSet::all(k);
  while (!unranked.empty()) {
    ServerIndex top = rule(request, unranked);
    if (!unranked.contains(top)) {
      result.consistent = false;
      result.counterexample = unranked;
      return result;
    }
    result.order.push_back(top);
    unranked.erase(top);
  }

  auto check = [&](const ServerSet& subset) {
    ++result.subsets_checked;
    if (rule(request, subset) != order_max(result.order, subset)) {
      result.consistent = false;
      result.counterexample = subset;
      return false;
    }
    return true;
  };

  if (k <= 12) {
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      ServerSet subset(k);
      for (ServerIndex j = 0; j < k; ++j) {
        if (mask & (1u << j)) subset.insert(j);
      }
      if (!check(subset)) break;
    }
  } else {
    Rng rng(seed);
    for (std::size_t trial = 0; trial < samples; ++trial) {
      ServerSet subset(k);
      for (ServerIndex j = 0; j < k; ++j) {
        if (rng.chance(1, 2)) subset.insert(j);
      }
      if (subset.empty()) subset.insert(rng.index(k));
      if (!check(subset)) break;
    }
  }
  return result;
}

}  // namespace ofal
