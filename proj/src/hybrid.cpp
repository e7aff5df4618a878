#include "ofal/hybrid.hpp"

#include <algorithm>
#include <sstream>

#include "ofal/alpha.hpp"
#include "ofal/offline_opt.hpp"
#include "ofal/random.hpp"

namespace ofal {

UnitExpansion expand_to_unit(const PriorityRule& rule, const Instance& inst) {
  if (rule.server_count != inst.size()) {
    throw Error("rule '" + rule.id + "' does not match the instance size");
  }
  UnitExpansion ex;
  for (ServerIndex j = 0; j < inst.size(); ++j) {
    ex.first_slot.push_back(ex.positions.size());
    for (int c = 0; c < inst.capacity(j); ++c) {
      ex.positions.push_back(inst.layout()[j]);
      ex.owner.push_back(j);
    }
  }
  if (inst.is_unit()) {
    ex.rule = rule;
    return ex;
  }
  const std::size_t k = inst.size();
  ex.rule.id = rule.id + "/unit";
  ex.rule.server_count = ex.positions.size();
  ex.rule.decide = [base = rule, owner = ex.owner, first = ex.first_slot, k](const Rational& r,
                                                                             const ServerSet& slots) {
    ServerSet free(k);
    for (ServerIndex u : slots.members()) free.insert(owner[u]);
    ServerIndex j = base(r, free);
    for (ServerIndex u = first[j]; u < owner.size() && owner[u] == j; ++u) {
      if (slots.contains(u)) return u;
    }
    throw Error("rule '" + base.id + "' chose a full server");
  };
  return ex;
}

namespace {

std::vector<ServerIndex> difference(const ServerSet& a, const ServerSet& b) {
  std::vector<ServerIndex> out;
  for (ServerIndex j : a.members()) {
    if (!b.contains(j)) out.push_back(j);
  }
  return out;
}

std::string at_step(std::size_t t) { return " at step " + std::to_string(t); }

bool strictly_between(const Rational& p, const Rational& a, const Rational& b) {
  return (a < p && p < b) || (b < p && p < a);
}

}  // namespace

HybridTrace run_hybrid(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq, std::size_t step,
                       ServerIndex server) {
  if (step >= seq.size()) throw Error("deviation step " + std::to_string(step) + " is past the sequence");
  if (server >= inst.size()) throw Error("server " + std::to_string(server) + " out of range");
  UnitExpansion ex = expand_to_unit(rule, inst);
  std::vector<int> ones(ex.positions.size(), 1);

  HybridTrace ht;
  ht.positions = ex.positions;
  ht.sequence = seq;
  ht.base = simulate_on(ex.rule, ex.positions, ones, seq);
  ht.deviation_step = step;

  ServerSet before = ht.base.free_after(step);
  std::optional<ServerIndex> slot;
  for (ServerIndex u = ex.first_slot[server]; u < ex.owner.size() && ex.owner[u] == server; ++u) {
    if (before.contains(u)) {
      slot = u;
      break;
    }
  }
  if (!slot) throw Error("server " + std::to_string(server) + " is not free" + at_step(step));
  if (ex.positions[*slot] == ex.positions[ht.base.assignment[step]]) {
    throw Error("forced server coincides with the algorithm's own choice" + at_step(step));
  }
  ht.forced_server = *slot;
  ht.hybrid = simulate_on(ex.rule, ex.positions, ones, seq, Deviation{step, *slot});

  bool closed = false;
  ht.terminal_step = step;
  for (std::size_t t = step; t < seq.size(); ++t) {
    ServerSet fa = ht.base.free_after(t + 1);
    ServerSet fh = ht.hybrid.free_after(t + 1);
    auto da = difference(fa, fh);
    auto dh = difference(fh, fa);
    if (da.empty() && dh.empty()) {
      closed = true;
      continue;
    }
    if (closed) {
      ht.shape_violations.push_back("free sets differ again" + at_step(t));
      break;
    }
    if (da.size() != 1 || dh.size() != 1) {
      ht.shape_violations.push_back("free-set differences of sizes " + std::to_string(da.size()) + " and " +
                                    std::to_string(dh.size()) + at_step(t));
      break;
    }
    ht.a_chain.push_back(da.front());
    ht.h_chain.push_back(dh.front());
    ht.terminal_step = t;
  }
  ht.merged = closed;
  return ht;
}

std::vector<std::string> check_difference_shape(const HybridTrace& ht) {
  std::vector<std::string> out = ht.shape_violations;
  if (ht.a_chain.empty()) {
    out.push_back("empty chains");
    return out;
  }
  if (ht.a_chain.front() != ht.forced_server) out.push_back("a_i differs from the forced server");
  if (ht.h_chain.front() != ht.base.assignment[ht.deviation_step]) {
    out.push_back("h_i differs from the algorithm's choice");
  }
  return out;
}

std::vector<std::string> check_transition_rules(const HybridTrace& ht) {
  std::vector<std::string> out;
  const auto& a = ht.a_chain;
  const auto& h = ht.h_chain;
  const auto& ma = ht.base.assignment;
  const auto& mh = ht.hybrid.assignment;
  for (std::size_t u = 0; u + 1 < a.size(); ++u) {
    const std::size_t t = ht.deviation_step + u;
    bool a_moves = a[u] != a[u + 1];
    bool h_moves = h[u] != h[u + 1];
    if (a_moves && h_moves) out.push_back("P1: both chains move" + at_step(t + 1));
    if (a_moves && (ma[t + 1] != a[u] || mh[t + 1] != a[u + 1])) {
      out.push_back("P2: a-chain move not matched by the request" + at_step(t + 1));
    }
    if (h_moves && (ma[t + 1] != h[u + 1] || mh[t + 1] != h[u])) {
      out.push_back("P2: h-chain move not matched by the request" + at_step(t + 1));
    }
    if (!a_moves && !h_moves && ma[t + 1] != mh[t + 1]) {
      out.push_back("P2: chains still but the runs diverge" + at_step(t + 1));
    }
  }
  if (ht.merged && !a.empty()) {
    const std::size_t t = ht.terminal_step + 1;
    if (ma[t] != a.back() || mh[t] != h.back()) out.push_back("P3: merge step does not match the chain ends");
  }
  return out;
}

ChainCheck check_chain_monotone(const HybridTrace& ht) {
  ChainCheck result;
  const auto& pos = ht.positions;
  const std::size_t i = ht.deviation_step;
  const Rational& s = pos[ht.forced_server];
  const Rational& sa = pos[ht.base.assignment[i]];
  result.precondition_met = true;
  for (ServerIndex j : ht.base.free_after(i).members()) {
    if (strictly_between(pos[j], s, sa)) result.precondition_met = false;
  }
  if (!result.precondition_met || ht.a_chain.empty()) return result;

  const bool a_left = pos[ht.a_chain.front()] < pos[ht.h_chain.front()];
  for (std::size_t u = 0; u < ht.a_chain.size(); ++u) {
    const std::size_t t = i + u;
    const Rational& at = pos[ht.a_chain[u]];
    const Rational& htp = pos[ht.h_chain[u]];
    ServerSet fa = ht.base.free_after(t + 1);
    ServerSet fh = ht.hybrid.free_after(t + 1);
    for (ServerIndex j : fa.members()) {
      if (fh.contains(j) && strictly_between(pos[j], at, htp)) {
        result.violations.push_back("common free server " + std::to_string(j) + " between the chains" + at_step(t));
      }
    }
    if (u == 0) continue;
    const Rational& ap = pos[ht.a_chain[u - 1]];
    const Rational& hp = pos[ht.h_chain[u - 1]];
    bool ok = a_left ? (at <= ap && hp <= htp) : (ap <= at && htp <= hp);
    if (!ok) result.violations.push_back("chains not moving apart" + at_step(t));
  }
  return result;
}

namespace {

Rational sample_request(Rng& rng, const ServerLayout& layout) {
  const auto pos = layout.positions();
  Rational margin = layout.size() > 1 ? layout.diameter() / Rational(layout.size() - 1) : Rational(1);
  switch (rng.uniform_int(0, 3)) {
    case 0:
      return pos[rng.index(pos.size())];
    case 1: {
      std::size_t j = rng.index(pos.size());
      std::size_t m = std::min(j + 1, pos.size() - 1);
      return (pos[j] + pos[m]) / 2;
    }
    default:
      return rng.uniform_rational(layout.front() - margin, layout.back() + margin, 64 * layout.size());
  }
}

std::optional<ServerIndex> nearest_free(const ServerSet& free, std::span<const Rational> pos, ServerIndex from,
                                        bool to_left) {
  std::optional<ServerIndex> best;
  for (ServerIndex j : free.members()) {
    if (to_left ? !(pos[j] < pos[from]) : !(pos[from] < pos[j])) continue;
    if (!best || (to_left ? pos[*best] < pos[j] : pos[j] < pos[*best])) best = j;
  }
  return best;
}

}  // namespace

C3Report check_c3(const PriorityRule& rule, const ServerLayout& layout, std::size_t trials, std::uint64_t seed) {
  C3Report report;
  report.trials = trials;
  const std::size_t k = layout.size();
  if (k < 2) {
    report.vacuous = true;
    return report;
  }
  const Rational alpha = alpha_fast(layout).alpha;
  const Instance inst = Instance::unit(layout);
  const auto pos = layout.positions();
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RequestSequence seq;
    for (std::size_t t = 0; t < k; ++t) seq.push_back(sample_request(rng, layout));
    AssignmentTrace base = simulate(rule, inst, seq);
    for (std::size_t i = 0; i < k; ++i) {
      ServerSet free = base.free_after(i);
      ServerIndex chosen = base.assignment[i];
      Surrounding sur = surrounding_servers(seq[i], free, pos);
      std::vector<ServerIndex> candidates;
      for (auto side : {sur.left, sur.right}) {
        if (side && pos[*side] != pos[chosen]) candidates.push_back(*side);
      }
      bool fallback = false;
      if (candidates.empty()) {
        fallback = true;
        for (bool left : {true, false}) {
          if (auto j = nearest_free(free, pos, chosen, left)) candidates.push_back(*j);
        }
      }
      for (ServerIndex s : candidates) {
        HybridTrace ht = run_hybrid(rule, inst, seq, i, s);
        ++report.hybrids;
        if (fallback) ++report.fallback_hybrids;
        if (!ht.shape_violations.empty() || !ht.merged) {
          report.violations.push_back("trial " + std::to_string(trial) + ": hybrid free sets malformed");
          continue;
        }
        Rational lhs = distance(ht.positions[ht.h_chain.back()], seq[i]);
        Rational rhs = alpha * distance(seq[i], ht.positions[ht.a_chain.front()]);
        if (lhs > rhs) {
          std::ostringstream msg;
          msg << "trial " << trial << ", step " << i << ", s=" << s << ": |h_t* - r_i| = " << format_rational(lhs)
              << " > " << format_rational(rhs);
          report.violations.push_back(msg.str());
        }
      }
    }
  }
  return report;
}

ShiftCheck check_rightmost_shift(const GuardedRule& guarded, const ServerLayout& base_layout,
                                 const RequestSequence& seq) {
  ShiftCheck check;
  const Instance inst = Instance::unit(guarded.layout);
  if (seq.size() != inst.size()) return check;
  AssignmentTrace run = simulate(guarded.rule, inst, seq);
  OptResult opt = optimal_cost(inst, seq);
  const auto pos = guarded.layout.positions();
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const Rational& a = pos[run.assignment[t]];
    const Rational& o = pos[opt.assignment[t]];
    bool opposite = (a <= seq[t] && seq[t] <= o) || (o <= seq[t] && seq[t] <= a);
    if (!opposite) return check;
  }
  std::size_t i = 0;
  for (std::size_t t = 1; t < seq.size(); ++t) {
    if (seq[i] < seq[t]) i = t;
  }
  ServerSet free = run.free_after(i);
  std::optional<ServerIndex> star;
  for (ServerIndex j = 0; j < base_layout.size(); ++j) {
    if (free.contains(j)) star = j;
  }
  if (!star || !(seq[i] < pos[*star])) return check;

  std::vector<Rational> moved(seq.begin(), seq.end());
  moved[i] = pos[*star];
  AssignmentTrace shifted = simulate(guarded.rule, inst, RequestSequence(moved));
  check.applicable = true;
  check.cost_drop = run.total_cost - shifted.total_cost;
  check.allowance = (2 * alpha_fast(base_layout).alpha + 1) * distance(seq[i], pos[*star]);
  check.holds = check.cost_drop <= check.allowance;
  return check;
}

}  // namespace ofal
