#include "ofal/verification.hpp"

#include <algorithm>
#include <climits>
#include <sstream>
#include <thread>

#include "ofal/alpha.hpp"
#include "ofal/random.hpp"

namespace ofal {

void PropertyReport::absorb(PropertyReport other) {
  trials += other.trials;
  for (auto& v : other.violations) violations.push_back(std::move(v));
}

Json reproducer_to_json(const Reproducer& rep) {
  Json doc;
  doc["instance"] = instance_to_json(rep.instance);
  doc["sequence"] = sequence_to_json(rep.sequence);
  doc["seed"] = rep.seed;
  doc["algorithm"] = rep.algorithm;
  return doc;
}

Json report_to_json(const PropertyReport& report) {
  Json doc;
  doc["property"] = report.property;
  doc["trials"] = report.trials;
  doc["verdict"] = report.verdict();
  Json list = Json::array();
  for (const auto& v : report.violations) {
    Json item;
    item["message"] = v.message;
    if (v.reproducer) item["reproducer"] = reproducer_to_json(*v.reproducer);
    list.push_back(std::move(item));
  }
  doc["violations"] = std::move(list);
  return doc;
}

PropertyReport check_surrounding_oriented(const AssignmentTrace& trace, const ServerLayout& layout,
                                          const RequestSequence& seq) {
  PropertyReport report;
  report.property = "surrounding-oriented";
  report.trials = 1;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    ServerSet free = trace.free_after(t);
    Surrounding s = surrounding_servers(seq[t], free, layout);
    if (!is_surrounding(trace.assignment[t], s, layout.positions())) {
      report.violations.push_back({"step " + std::to_string(t) + ": server " + std::to_string(trace.assignment[t]) +
                                       " is not a surrounding server of " + format_rational(seq[t]),
                                   std::nullopt});
    }
  }
  return report;
}

PropertyReport check_faithful(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq,
                              std::size_t trials, std::uint64_t seed) {
  PropertyReport report;
  report.property = "faithful";
  report.trials = trials;
  AssignmentTrace base = simulate(rule, inst, seq);
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<Rational> closer;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const Rational& s = inst.layout()[base.assignment[t]];
      Rational lambda = rng.chance(1, 4) ? Rational(0) : ratio(rng.uniform_int(0, 16), 16);
      closer.push_back(seq[t] + (s - seq[t]) * lambda);
    }
    RequestSequence tau(std::move(closer));
    AssignmentTrace moved = simulate(rule, inst, tau);
    if (moved.assignment != base.assignment) {
      report.violations.push_back(
          {"closer sequence changes the assignment in trial " + std::to_string(trial), Reproducer{inst, tau, seed, rule.id}});
    }
  }
  return report;
}

std::vector<bool> opposite_steps(const AssignmentTrace& trace, const OptResult& opt, const ServerLayout& layout,
                                 const RequestSequence& seq) {
  std::vector<bool> out;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const Rational& a = layout[trace.assignment[t]];
    const Rational& o = layout[opt.assignment[t]];
    const Rational& r = seq[t];
    out.push_back((a <= r && r <= o) || (o <= r && r <= a));
  }
  return out;
}

bool is_opposite(const AssignmentTrace& trace, const OptResult& opt, const ServerLayout& layout,
                 const RequestSequence& seq) {
  auto steps = opposite_steps(trace, opt, layout, seq);
  return std::all_of(steps.begin(), steps.end(), [](bool b) { return b; });
}

PropertyReport check_opposite(const AssignmentTrace& trace, const OptResult& opt, const ServerLayout& layout,
                              const RequestSequence& seq) {
  PropertyReport report;
  report.property = "opposite";
  report.trials = 1;
  auto steps = opposite_steps(trace, opt, layout, seq);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (!steps[t]) report.violations.push_back({"step " + std::to_string(t) + " is not opposite", std::nullopt});
  }
  return report;
}

RatioReport check_ratio_bound(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq) {
  RatioReport out;
  out.alg_cost = simulate(rule, inst, seq).total_cost;
  out.opt_cost = noncrossing_dp_cost(inst, seq);
  out.rate = Rate::of(out.alg_cost, out.opt_cost);
  out.bound = ptcp_bound(inst.layout());
  out.algorithm_id = rule.id;
  return out;
}

Rational adx_bound(const ServerLayout& base_layout, const Rational& d, const Rational& x) {
  Rational delta = base_layout.diameter();
  Rational a = ptcp_bound(base_layout);
  Rational b = (2 * d - x) / x;
  Rational c = (2 * delta + d + x) / (d - x);
  return std::max({a, b, c});
}

AdxCheck check_adx_bound(const PriorityRule& base, const ServerLayout& base_layout, const Rational& d,
                         const Rational& x, const Instance& inst, const RequestSequence& seq) {
  GuardedRule guarded = guard_rule(base, base_layout, d, x);
  if (!(inst.layout() == guarded.layout)) throw Error("instance layout must be S plus the extra server");
  AdxCheck check;
  check.report.property = "adx-bound";
  check.report.trials = 1;
  check.bound = adx_bound(base_layout, d, x);

  AssignmentTrace run = simulate(guarded.rule, inst, seq);
  OptResult opt = optimal_cost(inst, seq);
  check.rate = Rate::of(run.total_cost, opt.cost);
  auto fail = [&](std::string message) {
    check.report.violations.push_back({std::move(message), Reproducer{inst, seq, 0, guarded.rule.id}});
  };
  if (run.total_cost > check.bound * opt.cost) {
    fail("cost " + format_rational(run.total_cost) + " exceeds " + format_rational(check.bound) + " x opt " +
         format_rational(opt.cost));
  }
  for (const auto& r : seq) {
    if (guarded.threshold < r && r <= guarded.layout.back()) ++check.beyond_threshold;
  }
  check.opposite = is_opposite(run, opt, inst.layout(), seq);
  if (inst.is_unit() && check.opposite) {
    if (check.beyond_threshold > 2) fail("opposite sequence with more than two requests beyond the threshold");
    // With fewer than k + 1 requests the optimum may serve the lone
    // request beyond the threshold from S, so only full sequences qualify.
    if (check.beyond_threshold == 1 && seq.size() == inst.size() && !check.rate.within(ptcp_bound(base_layout))) {
      fail("opposite sequence with one request beyond the threshold exceeds 2 alpha(S) + 1");
    }
  }
  return check;
}

namespace {

using i128 = __int128;

struct ScaledGrid {
  std::vector<std::vector<std::int64_t>> dist;  // [point][server]
  std::vector<std::vector<ServerIndex>> order;  // [point], highest priority first
};

std::int64_t to_int64(const mpz_class& z, const char* what) {
  if (!z.fits_slong_p()) throw Error(std::string(what) + " does not fit in 64 bits");
  return z.get_si();
}

ScaledGrid scale_grid(const PriorityRule& rule, const Instance& inst, std::span<const Rational> points,
                      std::size_t n_max) {
  mpz_class lcm = 1;
  for (const auto& p : points) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), p.get_den_mpz_t());
  for (const auto& s : inst.layout().positions()) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), s.get_den_mpz_t());
  const std::int64_t limit = (std::int64_t(1) << 60) / static_cast<std::int64_t>(std::max<std::size_t>(n_max, 1));
  ScaledGrid grid;
  for (const auto& p : points) {
    std::vector<std::int64_t> row;
    for (const auto& s : inst.layout().positions()) {
      Rational scaled = distance(p, s) * Rational(lcm);
      scaled.canonicalize();
      std::int64_t v = to_int64(scaled.get_num(), "scaled distance");
      if (v > limit) throw Error("grid distances too large for the integer search");
      row.push_back(v);
    }
    grid.dist.push_back(std::move(row));
    PriorityOrder order = derive_priority_order(rule, p);
    if (!order.consistent) {
      throw Error("rule '" + rule.id + "' has no priority order at " + format_rational(p));
    }
    grid.order.push_back(std::move(order.order));
  }
  return grid;
}

struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;
  bool infinite = false;
};

bool greater(const Fraction& a, const Fraction& b) {
  if (a.infinite || b.infinite) return a.infinite && !b.infinite;
  return i128(a.num) * b.den > i128(b.num) * a.den;
}

/// Multisets of size n over g symbols, ranked through the combinatorial
/// number system on b_i = a_i + i.
class MultisetMemo {
 public:
  MultisetMemo(std::size_t symbols, std::size_t n_max) : n_max_(n_max) {
    const std::size_t top = symbols + n_max;
    binom_.assign(top + 1, std::vector<double>(n_max + 2, 0));
    for (std::size_t a = 0; a <= top; ++a) {
      binom_[a][0] = 1;
      for (std::size_t b = 1; b <= std::min(a, n_max + 1); ++b) binom_[a][b] = binom_[a - 1][b - 1] + binom_[a - 1][b];
    }
    double total = 0;
    for (std::size_t n = 1; n <= n_max; ++n) total += binom_[symbols + n - 1][n];
    enabled_ = total <= 6e7;
    if (!enabled_) return;
    tables_.resize(n_max + 1);
    for (std::size_t n = 1; n <= n_max; ++n) {
      tables_[n].assign(static_cast<std::size_t>(binom_[symbols + n - 1][n]), -1);
    }
  }
  std::int64_t* slot(const std::vector<std::size_t>& sorted) {
    if (!enabled_) return nullptr;
    std::size_t rank = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) rank += static_cast<std::size_t>(binom_[sorted[i] + i][i + 1]);
    return &tables_[sorted.size()][rank];
  }

 private:
  std::size_t n_max_;
  bool enabled_ = false;
  std::vector<std::vector<double>> binom_;
  std::vector<std::vector<std::int64_t>> tables_;
};

struct SearchWorker {
  const ScaledGrid& grid;
  std::span<const int> capacities;
  std::size_t n_max;
  std::optional<std::pair<std::int64_t, std::int64_t>> bound;

  std::vector<int> residual;
  std::vector<std::size_t> seq;
  std::vector<std::size_t> sorted;
  MultisetMemo memo;
  std::int64_t alg = 0;

  Fraction worst;
  std::vector<std::size_t> witness;
  std::size_t count = 0;
  std::size_t violations = 0;
  std::optional<std::vector<std::size_t>> first_violation;

  SearchWorker(const ScaledGrid& g, std::span<const int> caps, std::size_t n, std::optional<std::pair<std::int64_t, std::int64_t>> b)
      : grid(g), capacities(caps), n_max(n), bound(b), residual(caps.begin(), caps.end()), memo(g.dist.size(), n) {}

  std::int64_t opt() {
    std::int64_t* cached = memo.slot(sorted);
    if (cached && *cached >= 0) return *cached;
    auto value = noncrossing_min_cost<std::int64_t>(sorted.size(), capacities,
                                                    [&](std::size_t t, std::size_t j) { return grid.dist[sorted[t]][j]; });
    if (cached) *cached = *value;
    return *value;
  }

  void evaluate() {
    ++count;
    std::int64_t o = opt();
    Fraction rate;
    if (o == 0) {
      rate.infinite = alg > 0;
    } else {
      rate.num = alg;
      rate.den = o;
    }
    if (witness.empty() || greater(rate, worst)) {
      worst = rate;
      witness = seq;
    }
    if (bound && (rate.infinite || i128(alg) * bound->second > i128(bound->first) * o)) {
      ++violations;
      if (!first_violation) first_violation = seq;
    }
  }

  void extend(std::size_t point) {
    ServerIndex j = 0;
    for (ServerIndex cand : grid.order[point]) {
      if (residual[cand] > 0) {
        j = cand;
        break;
      }
    }
    --residual[j];
    alg += grid.dist[point][j];
    seq.push_back(point);
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), point), point);
    evaluate();
    if (seq.size() < n_max) {
      for (std::size_t next = 0; next < grid.dist.size(); ++next) extend(next);
    }
    sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), point));
    seq.pop_back();
    alg -= grid.dist[point][j];
    ++residual[j];
  }
};

}  // namespace

SearchResult grid_search(const PriorityRule& rule, const Instance& inst, std::span<const Rational> grid,
                         std::size_t n_max, std::optional<Rational> bound, unsigned workers, double budget) {
  std::vector<Rational> points(grid.begin(), grid.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.empty()) throw Error("empty grid");
  n_max = std::min<std::size_t>(n_max, static_cast<std::size_t>(inst.total_capacity()));
  double total = 0;
  double layer = 1;
  for (std::size_t n = 1; n <= n_max; ++n) {
    layer *= static_cast<double>(points.size());
    total += layer;
  }
  if (total > budget) throw Error("grid search over " + std::to_string(total) + " sequences exceeds the budget");
  if (rule.server_count != inst.size()) throw Error("rule does not match the instance");

  ScaledGrid scaled = scale_grid(rule, inst, points, n_max);
  std::optional<std::pair<std::int64_t, std::int64_t>> int_bound;
  if (bound) int_bound = {{to_int64(bound->get_num(), "bound"), to_int64(bound->get_den(), "bound")}};

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  std::vector<std::unique_ptr<SearchWorker>> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.push_back(std::make_unique<SearchWorker>(scaled, inst.capacities(), n_max, int_bound));
  }
  auto run = [&](unsigned w) {
    if (n_max == 0) return;
    for (std::size_t first = w; first < points.size(); first += workers) pool[w]->extend(first);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }

  SearchResult result;
  const SearchWorker* best = nullptr;
  std::optional<std::vector<std::size_t>> first_violation;
  for (const auto& w : pool) {
    result.sequences += w->count;
    result.bound_violations += w->violations;
    if (w->first_violation && (!first_violation || *w->first_violation < *first_violation)) {
      first_violation = w->first_violation;
    }
    if (w->witness.empty()) continue;
    if (!best || greater(w->worst, best->worst) ||
        (!greater(best->worst, w->worst) && w->witness < best->witness)) {
      best = w.get();
    }
  }
  auto to_sequence = [&](const std::vector<std::size_t>& idx) {
    RequestSequence seq;
    for (std::size_t i : idx) seq.push_back(points[i]);
    return seq;
  };
  if (best) {
    if (best->worst.infinite) {
      result.worst = Rate::infinity();
    } else {
      Rational value(mpz_class(best->worst.num), mpz_class(best->worst.den));
      value.canonicalize();
      result.worst = Rate::finite(value);
    }
    result.witness = to_sequence(best->witness);
  }
  if (first_violation) result.first_violation = to_sequence(*first_violation);
  return result;
}

CapacityProbe capacity_insensitivity_probe(const PriorityRule& rule, const ServerLayout& layout, int max_capacity,
                                           std::span<const Rational> grid, std::size_t n_max, unsigned workers) {
  CapacityProbe probe;
  probe.report.property = "capacity-insensitivity";
  probe.unit_worst = grid_search(rule, Instance::unit(layout), grid, layout.size(), std::nullopt, workers).worst;
  for (int c = 2; c <= max_capacity; ++c) {
    Instance inst = Instance::uniform(layout, c);
    SearchResult res = grid_search(rule, inst, grid, n_max, std::nullopt, workers);
    ++probe.report.trials;
    if (probe.unit_worst < res.worst) {
      probe.report.violations.push_back({"capacity " + std::to_string(c) + " reaches rate " + res.worst.to_string() +
                                             " above the unit-capacity worst " + probe.unit_worst.to_string(),
                                         Reproducer{inst, res.witness, 0, rule.id}});
    }
    probe.capacitated_worst.emplace_back(c, res.worst);
  }
  return probe;
}

}  // namespace ofal
