#include "ofal/offline_opt.hpp"

#include <cmath>
#include <numeric>

namespace ofal {
namespace {

void require_fits(const Instance& inst, const RequestSequence& seq) {
  if (auto violation = validate_pair(inst, seq)) throw Error(*violation);
}

// Successive shortest paths where request nodes are contracted away: an
// edge u -> v between servers moves some request currently on u over to v,
// at the cheapest such price. Paths start at the new request and end at a
// server with spare capacity.
class ContractedFlow {
 public:
  ContractedFlow(const Instance& inst) : inst_(inst), load_(inst.size(), 0) {}

  void insert(const Rational& request) {
    const std::size_t k = inst_.size();
    std::vector<Rational> row(k);
    for (ServerIndex j = 0; j < k; ++j) row[j] = distance(request, inst_.layout()[j]);

    // Cheapest transfer between every ordered pair of servers.
    std::vector<std::vector<std::optional<Rational>>> weight(k, std::vector<std::optional<Rational>>(k));
    std::vector<std::vector<std::size_t>> via(k, std::vector<std::size_t>(k, 0));
    for (std::size_t q = 0; q < assignment_.size(); ++q) {
      ServerIndex u = assignment_[q];
      for (ServerIndex v = 0; v < k; ++v) {
        if (v == u) continue;
        Rational w = costs_[q][v] - costs_[q][u];
        if (!weight[u][v] || w < *weight[u][v]) {
          weight[u][v] = std::move(w);
          via[u][v] = q;
        }
      }
    }

    // Label-correcting search from the new request.
    constexpr std::size_t kFromRequest = static_cast<std::size_t>(-1);
    std::vector<Rational> dist = row;
    std::vector<std::size_t> pred(k, kFromRequest);
    for (std::size_t round = 0; round < k; ++round) {
      bool changed = false;
      for (ServerIndex u = 0; u < k; ++u) {
        if (load_[u] == 0) continue;
        for (ServerIndex v = 0; v < k; ++v) {
          if (!weight[u][v]) continue;
          Rational candidate = dist[u] + *weight[u][v];
          if (candidate < dist[v]) {
            dist[v] = std::move(candidate);
            pred[v] = u;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    std::optional<ServerIndex> terminal;
    for (ServerIndex j = 0; j < k; ++j) {
      if (load_[j] >= inst_.capacity(j)) continue;
      if (!terminal || dist[j] < dist[*terminal]) terminal = j;
    }
    if (!terminal) throw Error("no server has spare capacity");

    cost_ += dist[*terminal];
    ServerIndex v = *terminal;
    ++load_[v];
    while (pred[v] != kFromRequest) {
      ServerIndex u = pred[v];
      assignment_[via[u][v]] = v;
      v = u;
    }
    assignment_.push_back(v);
    costs_.push_back(std::move(row));
  }

  const Rational& cost() const { return cost_; }
  const std::vector<ServerIndex>& assignment() const { return assignment_; }

 private:
  const Instance& inst_;
  std::vector<int> load_;
  std::vector<ServerIndex> assignment_;
  std::vector<std::vector<Rational>> costs_;
  Rational cost_{0};
};

std::optional<Rational> dp_over(const std::vector<Rational>& sorted, const ServerLayout& layout,
                                std::span<const int> caps) {
  return noncrossing_min_cost<Rational>(sorted.size(), caps, [&](std::size_t t, std::size_t j) {
    return distance(sorted[t], layout[j]);
  });
}

std::vector<ServerIndex> lexicographic_optimum(const Instance& inst, const RequestSequence& seq,
                                               const Rational& optimum) {
  const std::size_t n = seq.size();
  const std::size_t k = inst.size();
  std::vector<int> caps(inst.capacities().begin(), inst.capacities().end());
  std::vector<ServerIndex> assignment;
  Rational fixed_cost(0);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<Rational> rest(seq.requests().begin() + static_cast<std::ptrdiff_t>(t + 1), seq.requests().end());
    std::sort(rest.begin(), rest.end());
    bool placed = false;
    for (ServerIndex j = 0; j < k && !placed; ++j) {
      if (caps[j] == 0) continue;
      --caps[j];
      Rational here = fixed_cost + distance(seq[t], inst.layout()[j]);
      auto tail = dp_over(rest, inst.layout(), caps);
      if (tail && here + *tail == optimum) {
        assignment.push_back(j);
        fixed_cost = std::move(here);
        placed = true;
      } else {
        ++caps[j];
      }
    }
    if (!placed) throw Error("lexicographic optimum reconstruction failed");
  }
  return assignment;
}

}  // namespace

OptResult optimal_cost(const Instance& inst, const RequestSequence& seq, AssignmentOrder order) {
  require_fits(inst, seq);
  ContractedFlow flow(inst);
  for (const Rational& r : seq) flow.insert(r);
  OptResult result{flow.cost(), flow.assignment()};
  if (order == AssignmentOrder::lexicographic && !seq.empty()) {
    result.assignment = lexicographic_optimum(inst, seq, result.cost);
  }
  return result;
}

long double feasible_assignment_count(std::span<const int> capacities, std::size_t n) {
  // n! [x^n] prod_j sum_{u <= c_j} x^u / u!
  std::vector<long double> poly(n + 1, 0.0L);
  poly[0] = 1.0L;
  for (int c : capacities) {
    std::vector<long double> next(n + 1, 0.0L);
    for (std::size_t i = 0; i <= n; ++i) {
      if (poly[i] == 0.0L) continue;
      long double inv_fact = 1.0L;
      for (std::size_t u = 0; u <= static_cast<std::size_t>(c) && i + u <= n; ++u) {
        if (u > 0) inv_fact /= static_cast<long double>(u);
        next[i + u] += poly[i] * inv_fact;
      }
    }
    poly = std::move(next);
  }
  long double fact = 1.0L;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<long double>(i);
  return poly[n] * fact;
}

OptResult optimal_bruteforce(const Instance& inst, const RequestSequence& seq) {
  require_fits(inst, seq);
  const std::size_t n = seq.size();
  const std::size_t k = inst.size();
  if (feasible_assignment_count(inst.capacities(), n) > 1e7L) {
    throw Error("optimal_bruteforce: more than 10^7 feasible assignments");
  }
  std::vector<std::vector<Rational>> cost(n, std::vector<Rational>(k));
  for (std::size_t t = 0; t < n; ++t) {
    for (ServerIndex j = 0; j < k; ++j) cost[t][j] = distance(seq[t], inst.layout()[j]);
  }
  std::vector<int> caps(inst.capacities().begin(), inst.capacities().end());
  std::vector<ServerIndex> current(n);
  OptResult best;
  bool found = false;
  Rational partial(0);

  auto recurse = [&](auto&& self, std::size_t t) -> void {
    if (t == n) {
      if (!found || partial < best.cost) {
        best.cost = partial;
        best.assignment = current;
        found = true;
      }
      return;
    }
    for (ServerIndex j = 0; j < k; ++j) {
      if (caps[j] == 0) continue;
      --caps[j];
      current[t] = j;
      partial += cost[t][j];
      self(self, t + 1);
      partial -= cost[t][j];
      ++caps[j];
    }
  };
  recurse(recurse, 0);
  if (!found) best.cost = 0;
  return best;
}

Rational noncrossing_dp_cost(const Instance& inst, const RequestSequence& seq) {
  std::vector<Rational> sorted(seq.begin(), seq.end());
  std::sort(sorted.begin(), sorted.end());
  auto result = dp_over(sorted, inst.layout(), inst.capacities());
  if (!result) throw Error(*validate_pair(inst, seq));
  return *result;
}

}  // namespace ofal
