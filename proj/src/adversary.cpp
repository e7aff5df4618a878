#include "ofal/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "ofal/algorithms.hpp"
#include "ofal/offline_opt.hpp"

namespace ofal {

namespace {

std::vector<int> capacity_profile(const AdversaryParams& params, std::size_t servers) {
  if (params.capacities.empty()) {
    if (params.capacity < 1) throw Error("capacity must be positive");
    return std::vector<int>(servers, params.capacity);
  }
  if (params.capacities.size() != servers) {
    throw Error("capacity profile has " + std::to_string(params.capacities.size()) + " entries, layout has " +
                std::to_string(servers) + " servers");
  }
  return params.capacities;
}

std::size_t prefill(const Instance& inst, RequestSequence& seq) {
  std::size_t count = 0;
  for (ServerIndex j = 0; j < inst.size(); ++j) {
    for (int c = 1; c < inst.capacity(j); ++c) {
      seq.push_back(inst.layout()[j]);
      ++count;
    }
  }
  return count;
}

Rational power(const Rational& base, std::size_t e) {
  Rational out(1);
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

Rational greedy_delta(std::size_t k, const Rational& epsilon) {
  const Rational target = epsilon / Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(k));
  return largest_decimal_power_satisfying([&](const Rational& delta) {
    Rational kd = delta * static_cast<unsigned long>(k);
    return kd / (1 + kd) <= target;
  });
}

bool permutation_delta_valid(std::size_t k, const Rational& epsilon, const Rational& delta) {
  if (delta <= 0 || delta >= 1) return false;
  Rational first = power(delta, k) + delta * static_cast<unsigned long>(4 * k - 1);
  Rational second = 1 / (1 - delta);
  return first < epsilon && second < 1 + epsilon / 2;
}

Rational permutation_delta(std::size_t k, const Rational& epsilon) {
  return largest_decimal_power_satisfying(
      [&](const Rational& delta) { return permutation_delta_valid(k, epsilon, delta); });
}

AdversaryCase greedy_adversary(const AdversaryParams& params) {
  const std::size_t k = params.k;
  if (k < 2) throw Error("the greedy construction needs k >= 2");
  if (params.epsilon <= 0) throw Error("epsilon must be positive");
  Rational delta = params.delta ? *params.delta : greedy_delta(k, params.epsilon);
  if (delta <= 0) throw Error("delta must be positive");

  std::vector<Rational> positions{Rational(0)};
  for (std::size_t i = 2; i <= k; ++i) positions.emplace_back(mpz_class(1) << static_cast<mp_bitcnt_t>(i - 1));
  Instance inst(ServerLayout(positions), capacity_profile(params, k));

  RequestSequence seq;
  std::size_t pre = prefill(inst, seq);
  for (std::size_t i = 1; i <= k; ++i) {
    seq.push_back(Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(i - 1)) + delta);
  }
  return AdversaryCase{std::move(inst), std::move(seq), delta, params.epsilon, "greedy-exp-k" + std::to_string(k), pre};
}

AdversaryCase permutation_adversary(const AdversaryParams& params) {
  const std::size_t k = params.k;
  if (k < 1) throw Error("the permutation construction needs k >= 1");
  if (params.epsilon <= 0) throw Error("epsilon must be positive");
  Rational delta = params.delta ? *params.delta : permutation_delta(k, params.epsilon);
  if (!permutation_delta_valid(k, params.epsilon, delta)) {
    throw Error("delta " + format_rational(delta) + " violates the constraints for k=" + std::to_string(k) +
                ", epsilon=" + format_rational(params.epsilon));
  }

  // s[p] for p = 1..2k (slot 0 unused).
  std::vector<Rational> s(2 * k + 1);
  for (std::size_t i = 1; i <= k; ++i) {
    Rational v = (1 - power(delta, i)) / (1 - delta);
    s[k + i] = v;
    s[k - i + 1] = -v;
  }
  Instance inst(ServerLayout(std::vector<Rational>(s.begin() + 1, s.end())), capacity_profile(params, 2 * k));

  auto eps = [&](std::size_t j) -> Rational {
    return power(delta, k) / (1 - delta) / Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(2 * k - j + 1));
  };
  RequestSequence seq;
  std::size_t pre = prefill(inst, seq);
  for (std::size_t i = 1; i <= k; ++i) {
    Rational odd = (s[k + i - 1] + s[k + i]) / 2;
    seq.push_back(odd - eps(2 * i - 1));
    // The last even midpoint would need s_0; it is taken to be s_1.
    Rational even = i < k ? (s[k - i] + s[k - i + 1]) / 2 : s[1];
    seq.push_back(even + eps(2 * i));
  }
  return AdversaryCase{std::move(inst), std::move(seq), delta, params.epsilon, "permutation-geo-k" + std::to_string(k),
                       pre};
}

Distribution parse_distribution(const std::string& name) {
  if (name == "uniform") return Distribution::uniform;
  if (name == "near-servers" || name == "near_servers") return Distribution::near_servers;
  if (name == "opposite" || name == "opposite-biased" || name == "opposite_biased") {
    return Distribution::opposite_biased;
  }
  throw Error("unknown distribution '" + name + "'");
}

namespace {

Rational mean_gap(const ServerLayout& layout) {
  return layout.size() > 1 ? layout.diameter() / Rational(static_cast<long>(layout.size() - 1)) : Rational(1);
}

Rational uniform_point(const ServerLayout& layout, Rng& rng) {
  Rational margin = mean_gap(layout);
  return rng.uniform_rational(layout.front() - margin, layout.back() + margin, 240);
}

Rational near_server_point(const ServerLayout& layout, Rng& rng) {
  Rational s = layout[rng.index(layout.size())];
  if (rng.chance(1, 4)) return s;
  Rational spread = mean_gap(layout) / 4;
  return rng.uniform_rational(s - spread, s + spread, 32);
}

}  // namespace

RequestSequence random_sequence(const Instance& inst, std::size_t n, Rng& rng, Distribution dist,
                                const PriorityRule* pilot) {
  if (static_cast<long long>(n) > inst.total_capacity()) {
    throw Error(std::to_string(n) + " requests exceed total capacity " + std::to_string(inst.total_capacity()));
  }
  const ServerLayout& layout = inst.layout();
  std::vector<Rational> requests;
  for (std::size_t t = 0; t < n; ++t) {
    requests.push_back(dist == Distribution::near_servers ? near_server_point(layout, rng)
                                                          : uniform_point(layout, rng));
  }
  if (dist != Distribution::opposite_biased || n == 0) return RequestSequence(std::move(requests));

  PriorityRule rule = pilot ? *pilot : make_ptcp_rule(layout);
  for (int round = 0; round < 3; ++round) {
    RequestSequence seq(requests);
    AssignmentTrace run = simulate(rule, inst, seq);
    OptResult opt = optimal_cost(inst, seq);
    bool changed = false;
    for (std::size_t t = 0; t < n; ++t) {
      Rational a = layout[run.assignment[t]];
      Rational o = layout[opt.assignment[t]];
      if (o < a) std::swap(a, o);
      if (a <= requests[t] && requests[t] <= o) continue;
      requests[t] = rng.uniform_rational(a, o, 16);
      changed = true;
    }
    if (!changed) break;
  }
  return RequestSequence(std::move(requests));
}

RequestSequence SequenceStream::next() {
  Rng child(rng_.split());
  return random_sequence(inst_, n_, child, dist_);
}

ServerLayout random_layout(Rng& rng, std::size_t k, int gap_max) {
  if (k == 0) throw Error("a layout needs at least one server");
  std::vector<Rational> positions{Rational(rng.uniform_int(-5, 5))};
  Rational gap;
  for (std::size_t j = 1; j < k; ++j) {
    if (j == 1 || !rng.chance(1, 4)) gap = ratio(rng.uniform_int(2, 2 * gap_max), 2);
    positions.push_back(positions.back() + gap);
  }
  return ServerLayout(std::move(positions));
}

std::vector<Rational> candidate_grid(const ServerLayout& layout) {
  std::vector<Rational> base(layout.positions().begin(), layout.positions().end());
  Rational min_gap(1);
  if (layout.size() > 1) {
    min_gap = layout[1] - layout[0];
    for (ServerIndex j = 1; j + 1 < layout.size(); ++j) min_gap = std::min<Rational>(min_gap, layout[j + 1] - layout[j]);
  }
  for (const auto& c : SplitTree(layout).critical_points()) base.push_back(c);
  for (ServerIndex j = 0; j + 1 < layout.size(); ++j) base.push_back((layout[j] + layout[j + 1]) / 2);
  const Rational eps = min_gap / 16;
  std::vector<Rational> grid;
  for (const auto& p : base) {
    grid.push_back(p - eps);
    grid.push_back(p);
    grid.push_back(p + eps);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

GridSequences::GridSequences(std::vector<Rational> points, std::size_t n, double budget)
    : points_(std::move(points)), n_(n), count_(std::pow(static_cast<double>(points_.size()), static_cast<double>(n))) {
  if (points_.empty() && n > 0) throw Error("empty grid");
  if (count_ > budget) {
    throw Error("grid enumeration of " + std::to_string(count_) + " sequences exceeds the budget");
  }
}

void GridSequences::partition(unsigned worker, unsigned workers) {
  if (workers == 0 || worker >= workers) throw Error("bad partition");
  worker_ = worker;
  workers_ = workers;
  started_ = false;
  done_ = false;
}

bool GridSequences::next(RequestSequence& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    index_.assign(n_, 0);
    if (n_ > 0) {
      index_[0] = worker_;
      if (index_[0] >= points_.size()) {
        done_ = true;
        return false;
      }
    } else if (worker_ != 0) {
      done_ = true;
      return false;
    }
  } else {
    std::size_t pos = n_;
    while (true) {
      if (pos == 0) {
        done_ = true;
        return false;
      }
      --pos;
      std::size_t step = pos == 0 ? workers_ : 1;
      index_[pos] += step;
      if (index_[pos] < points_.size()) break;
      if (pos == 0) {
        done_ = true;
        return false;
      }
      index_[pos] = 0;
    }
  }
  std::vector<Rational> requests;
  for (std::size_t i : index_) requests.push_back(points_[i]);
  out = RequestSequence(std::move(requests));
  return true;
}

}  // namespace ofal
