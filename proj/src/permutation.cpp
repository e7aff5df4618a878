#include "ofal/permutation.hpp"

#include <queue>

#include "ofal/offline_opt.hpp"

namespace ofal {

PrefixOptState::PrefixOptState(Instance inst)
    : inst_(std::move(inst)), used_(inst_.size(), 0), server_potential_(inst_.size(), Rational(0)) {}

ServerIndex PrefixOptState::step(const Rational& request) {
  const std::size_t k = inst_.size();
  if (static_cast<long long>(requests_.size()) >= inst_.total_capacity()) {
    throw Error("permutation_step: no capacity remains");
  }
  std::vector<Rational> row(k);
  for (ServerIndex j = 0; j < k; ++j) row[j] = distance(request, inst_.layout()[j]);

  Rational source_potential = server_potential_[0] - row[0];
  for (ServerIndex j = 1; j < k; ++j) {
    Rational p = server_potential_[j] - row[j];
    if (p > source_potential) source_potential = std::move(p);
  }

  // Nodes: servers 0..k-1, then prefix requests k..k+m-1.
  const std::size_t m = requests_.size();
  std::vector<std::vector<std::size_t>> on_server(k);
  for (std::size_t q = 0; q < m; ++q) on_server[matching_[q]].push_back(q);

  const std::size_t nodes = k + m;
  std::vector<std::optional<Rational>> dist(nodes);
  constexpr std::size_t kSource = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pred(nodes, kSource);
  std::vector<bool> done(nodes, false);

  using Entry = std::pair<Rational, std::size_t>;
  auto greater = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(greater)> heap(greater);

  auto relax = [&](std::size_t node, Rational value, std::size_t from) {
    if (!dist[node] || value < *dist[node]) {
      dist[node] = value;
      pred[node] = from;
      heap.emplace(std::move(value), node);
    }
  };
  for (ServerIndex j = 0; j < k; ++j) relax(j, row[j] + source_potential - server_potential_[j], kSource);

  while (!heap.empty()) {
    auto [d, node] = heap.top();
    heap.pop();
    if (done[node] || d != *dist[node]) continue;
    done[node] = true;
    if (node < k) {
      for (std::size_t q : on_server[node]) {
        Rational reduced = -costs_[q][node] + server_potential_[node] - request_potential_[q];
        relax(k + q, d + reduced, node);
      }
    } else {
      std::size_t q = node - k;
      for (ServerIndex j = 0; j < k; ++j) {
        if (j == matching_[q]) continue;
        Rational reduced = costs_[q][j] + request_potential_[q] - server_potential_[j];
        relax(j, d + reduced, node);
      }
    }
  }

  std::optional<ServerIndex> terminal;
  Rational best;
  for (ServerIndex j = 0; j < k; ++j) {
    if (used_[j] >= inst_.capacity(j) || !dist[j]) continue;
    Rational real = *dist[j] - source_potential + server_potential_[j];
    if (!terminal || real < best) {
      terminal = j;
      best = std::move(real);
    }
  }
  if (!terminal) throw Error("permutation_step: no augmenting path");

  for (ServerIndex j = 0; j < k; ++j) {
    if (dist[j]) server_potential_[j] += *dist[j];
  }
  for (std::size_t q = 0; q < m; ++q) {
    if (dist[k + q]) request_potential_[q] += *dist[k + q];
  }

  // Walk the path back: server <- request <- server ... <- new request.
  std::size_t node = *terminal;
  while (pred[node] != kSource) {
    std::size_t q_node = pred[node];
    std::size_t q = q_node - k;
    matching_[q] = node;
    node = pred[q_node];
  }
  requests_.push_back(request);
  costs_.push_back(std::move(row));
  matching_.push_back(node);
  // The new request sits at reduced cost zero on its matched edge.
  request_potential_.push_back(server_potential_[node] - costs_.back()[node]);
  ++used_[*terminal];
  cost_ += best;
  return *terminal;
}

AssignmentTrace permutation_run(const Instance& inst, const RequestSequence& seq, bool check_prefix) {
  if (auto violation = validate_pair(inst, seq)) throw Error(*violation);
  PrefixOptState state(inst);
  AssignmentTrace trace;
  trace.total_cost = 0;
  std::vector<int> remaining(inst.capacities().begin(), inst.capacities().end());
  trace.residual.push_back(remaining);
  RequestSequence prefix;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    ServerIndex j = state.step(seq[t]);
    --remaining[j];
    Rational cost = distance(seq[t], inst.layout()[j]);
    trace.total_cost += cost;
    trace.step_cost.push_back(std::move(cost));
    trace.assignment.push_back(j);
    trace.residual.push_back(remaining);
    if (check_prefix) {
      prefix.push_back(seq[t]);
      Rational expected = optimal_cost(inst, prefix, AssignmentOrder::any).cost;
      if (expected != state.cost()) {
        throw Error("permutation prefix " + std::to_string(t + 1) + " cost " + format_rational(state.cost()) +
                    " differs from optimum " + format_rational(expected));
      }
    }
  }
  return trace;
}

}  // namespace ofal
