#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ofal/adversary.hpp"
#include "ofal/alpha.hpp"
#include "ofal/experiment.hpp"
#include "ofal/verification.hpp"
#include "support.hpp"

using namespace ofal;
using test::q;

TEST_CASE("surrounding-oriented traces") {
  auto s = test::layout({"0", "1", "3", "7"});
  Instance inst(s, {1, 2, 1, 1});
  auto seq = test::requests({"2", "2", "5", "0.5", "9"});
  for (auto rule : {make_ptcp_rule(s), make_greedy_rule(s)}) {
    CHECK(check_surrounding_oriented(simulate(rule, inst, seq), s, seq).ok());
  }
  // Matching 2 to server 3 while 1 and 3 are free skips nothing, but
  // matching 0.5 to server 7 crosses free servers.
  AssignmentTrace bad = simulate_on(make_greedy_rule(s), s.positions(), std::vector<int>{1, 1, 1, 1},
                                    test::requests({"0.5"}), Deviation{0, 3});
  PropertyReport r = check_surrounding_oriented(bad, s, test::requests({"0.5"}));
  CHECK_FALSE(r.ok());
  CHECK(r.violations.size() == 1);
}

TEST_CASE("faithfulness") {
  auto s = test::layout({"0", "1", "3", "7"});
  Instance inst(s, {2, 1, 1, 2});
  auto seq = test::requests({"2", "2", "5", "0.5", "9", "1.9"});
  CHECK(check_faithful(make_ptcp_rule(s), inst, seq, 200).ok());
  CHECK(check_faithful(make_greedy_rule(s), inst, seq, 200).ok());
  CHECK(check_faithful(make_ptcp_rule(s), inst, seq, 0).ok());

  GuardedRule g = guard_rule(make_ptcp_rule(s), s, q(4), q("1.5"));
  Instance ginst = Instance::unit(g.layout);
  CHECK(check_faithful(g.rule, ginst, test::requests({"8", "10", "8.4", "2", "0"}), 200).ok());

  // A rule that prefers server 1 only for requests right of 0.5 but
  // otherwise takes the farthest free server is not faithful.
  PriorityRule far{"far", 2, [](const Rational& r, const ServerSet& f) {
                     if (f.count() == 1) return f.members().front();
                     return r > Rational(1, 2) ? ServerIndex{0} : ServerIndex{1};
                   }};
  auto two = test::layout({"0", "1"});
  CHECK_FALSE(check_faithful(far, Instance::unit(two), test::requests({"0.9"}), 50).ok());
}

TEST_CASE("opposite classification") {
  auto s = test::layout({"0", "2"});
  Instance inst = Instance::unit(s);
  AssignmentTrace trace;
  trace.assignment = {0};
  OptResult opt{0, {1}};
  CHECK(check_opposite(trace, opt, s, test::requests({"1"})).ok());
  CHECK_FALSE(check_opposite(trace, opt, s, test::requests({"-1"})).ok());
  CHECK(opposite_steps(trace, opt, s, test::requests({"-1"})) == std::vector<bool>{false});

  AdversaryParams p;
  p.k = 5;
  AdversaryCase c = greedy_adversary(p);
  AssignmentTrace g = simulate(make_greedy_rule(c.instance.layout()), c.instance, c.sequence);
  // Greedy overshoots to the right on every request except the last,
  // which it sends back to 0 while the optimum stays at 16.
  std::vector<bool> expected{true, true, true, true, false};
  CHECK(opposite_steps(g, optimal_cost(c.instance, c.sequence), c.instance.layout(), c.sequence) == expected);
  CHECK_FALSE(is_opposite(g, optimal_cost(c.instance, c.sequence), c.instance.layout(), c.sequence));
}

TEST_CASE("ratio reports") {
  auto s = test::layout({"0", "1", "3"});
  Instance inst = Instance::unit(s);
  RatioReport empty = check_ratio_bound(make_ptcp_rule(s), inst, RequestSequence{});
  CHECK(empty.rate == Rate::finite(1));
  CHECK(empty.bound == 4);
  RatioReport r = check_ratio_bound(make_ptcp_rule(s), inst, test::requests({"1.8", "1"}));
  CHECK(r.within_bound());
  CHECK(r.algorithm_id == "ptcp");

  SweepConfig cfg;
  cfg.trials = 500;
  cfg.seed = 4;
  CHECK(sweep_ratio("ptcp", cfg).ok());
  // Greedy can exceed 2 alpha + 1, but never with a zero optimum.
  PropertyReport greedy = sweep_ratio("greedy", cfg);
  for (const auto& v : greedy.violations) CHECK(v.message.find("zero optimum") == std::string::npos);
}

TEST_CASE("guarded bound") {
  auto s = test::layout({"0", "1"});
  CHECK(adx_bound(s, q(3), q(1)) == 5);
  Instance inst = Instance::unit(guard_rule(make_ptcp_rule(s), s, q(3), q(1)).layout);
  AdxCheck one = check_adx_bound(make_ptcp_rule(s), s, q(3), q(1), inst, test::requests({"3", "1", "0.5"}));
  CHECK(one.report.ok());
  CHECK(one.bound == 5);
  CHECK(one.beyond_threshold == 1);

  SweepConfig cfg;
  cfg.trials = 300;
  cfg.k_max = 4;
  cfg.n_max = 12;
  cfg.capacity_max = 3;
  PropertyReport r = sweep_adx(q(3), q(1), cfg);
  CHECK(r.ok());
  CHECK(r.trials == 300);
  CHECK_THROWS_AS(check_adx_bound(make_ptcp_rule(s), s, q(3), q(1), Instance::unit(s), RequestSequence{}), Error);
}

TEST_CASE("single request beyond the threshold") {
  // Short sequence: the optimum serves -15/4 from -4, so the full-sequence
  // argument does not apply and only the overall bound is checked.
  ServerLayout base({q(-4)});
  GuardedRule g = guard_rule(make_ptcp_rule(base), base, q(1), Rational(1, 6));
  AdxCheck short_check =
      check_adx_bound(make_ptcp_rule(base), base, q(1), Rational(1, 6), Instance::unit(g.layout), test::requests({"-3.75"}));
  CHECK(short_check.rate == Rate::finite(3));
  CHECK(short_check.opposite);
  CHECK(short_check.beyond_threshold == 1);
  CHECK(short_check.report.ok());

  // Full opposite sequences with one request beyond the threshold.
  Rng rng(8);
  std::size_t applicable = 0;
  for (int t = 0; t < 3000; ++t) {
    ServerLayout s = random_layout(rng, static_cast<std::size_t>(rng.uniform_int(1, 4)), 4);
    Rational d = ratio(rng.uniform_int(1, 12), 2);
    Rational x = d * ratio(rng.uniform_int(1, 7), 8);
    GuardedRule gr = guard_rule(make_ptcp_rule(s), s, d, x);
    Instance inst = Instance::unit(gr.layout);
    RequestSequence seq = random_sequence(inst, inst.size(), rng, Distribution::opposite_biased, &gr.rule);
    AdxCheck c = check_adx_bound(make_ptcp_rule(s), s, d, x, inst, seq);
    CHECK(c.report.ok());
    if (c.opposite && c.beyond_threshold == 1) {
      ++applicable;
      CHECK(c.rate.within(ptcp_bound(s)));
    }
  }
  MESSAGE("full opposite sequences with one request beyond the threshold: " << applicable);
  CHECK(applicable > 50);
}

TEST_CASE("integer grid search agrees with exact replay of every sequence") {
  auto s = test::layout({"0", "1", "3"});
  for (auto caps : {std::vector<int>{1, 1, 1}, std::vector<int>{2, 1, 1}}) {
    Instance inst(s, caps);
    std::vector<Rational> grid{q("-0.5"), q(0), q("0.5"), q("1.8"), q("1.9"), q(3)};
    for (std::string alg : {"ptcp", "greedy"}) {
      PriorityRule rule = make_rule(alg, s);
      SearchResult fast = grid_search(rule, inst, grid, 3, Rational(4));
      Rate worst = Rate::finite(1);
      std::size_t count = 0;
      std::size_t above = 0;
      for (std::size_t n = 1; n <= 3; ++n) {
        GridSequences seqs(grid, n);
        RequestSequence seq;
        while (seqs.next(seq)) {
          ++count;
          Rate r = Rate::of(simulate(rule, inst, seq).total_cost, optimal_bruteforce(inst, seq).cost);
          if (worst < r) worst = r;
          if (!r.within(Rational(4))) ++above;
        }
      }
      CHECK(fast.sequences == count);
      CHECK(fast.worst == worst);
      CHECK(fast.bound_violations == above);
      CHECK(Rate::of(simulate(rule, inst, fast.witness).total_cost, optimal_cost(inst, fast.witness).cost) == worst);
    }
  }
}

TEST_CASE("grid search is independent of the worker count") {
  auto s = test::layout({"0", "1", "3"});
  Instance inst = Instance::uniform(s, 2);
  auto grid = candidate_grid(s);
  SearchResult one = grid_search(make_greedy_rule(s), inst, grid, 3, Rational(4), 1);
  SearchResult three = grid_search(make_greedy_rule(s), inst, grid, 3, Rational(4), 3);
  CHECK(one.worst == three.worst);
  CHECK(one.witness == three.witness);
  CHECK(one.sequences == three.sequences);
  CHECK(one.bound_violations == three.bound_violations);
  CHECK(one.first_violation == three.first_violation);
}

TEST_CASE("grid search rejects rules without a priority order and oversized searches") {
  PriorityRule odd{"odd", 3, [](const Rational&, const ServerSet& f) {
                     auto m = f.members();
                     return f.count() == 2 ? m.back() : m.front();
                   }};
  auto s = test::layout({"0", "1", "3"});
  std::vector<Rational> grid{q(0)};
  CHECK_THROWS_AS(grid_search(odd, Instance::unit(s), grid, 2), Error);
  CHECK_THROWS_AS(grid_search(make_ptcp_rule(s), Instance::uniform(s, 9), candidate_grid(s), 20), Error);
}

TEST_CASE("greedy on two servers") {
  auto s = test::layout({"0", "1"});
  auto grid = candidate_grid(s);
  CapacityProbe probe = capacity_insensitivity_probe(make_greedy_rule(s), s, 3, grid, 6);
  CHECK(probe.report.ok());
  CHECK_FALSE(probe.unit_worst.is_infinite());
  CHECK(probe.unit_worst.value() >= Rational(299, 100));
  CHECK(probe.unit_worst.within(Rational(3)));
  CHECK(probe.capacitated_worst.size() == 2);
}
