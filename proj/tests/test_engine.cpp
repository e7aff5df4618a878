#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ofal/algorithms.hpp"
#include "ofal/engine.hpp"
#include "support.hpp"

using namespace ofal;
using test::q;

namespace {

ServerSet set_of(std::size_t k, std::initializer_list<ServerIndex> members) {
  ServerSet s(k);
  for (ServerIndex j : members) s.insert(j);
  return s;
}

}  // namespace

TEST_CASE("greedy engine run") {
  auto s = test::layout({"0", "2"});
  AssignmentTrace trace = simulate(make_greedy_rule(s), Instance::unit(s), test::requests({"0.9", "0.9"}));
  CHECK(trace.assignment == std::vector<ServerIndex>{0, 1});
  CHECK(trace.total_cost == q("0.9") + q("1.1"));
}

TEST_CASE("empty sequence gives an empty trace") {
  auto s = test::layout({"0", "2"});
  AssignmentTrace trace = simulate(make_ptcp_rule(s), Instance::unit(s), RequestSequence{});
  CHECK(trace.assignment.empty());
  CHECK(trace.total_cost == 0);
  CHECK(trace.residual.size() == 1);
}

TEST_CASE("engine rejects rules that pick a full server and oversized sequences") {
  auto s = test::layout({"0", "2"});
  PriorityRule stubborn{"stubborn", 2, [](const Rational&, const ServerSet&) { return ServerIndex{0}; }};
  CHECK_THROWS_AS(simulate(stubborn, Instance::unit(s), test::requests({"1", "1"})), Error);
  CHECK_THROWS_AS(simulate(make_greedy_rule(s), Instance::unit(s), test::requests({"1", "1", "1"})), Error);
  CHECK_THROWS_AS(simulate(make_greedy_rule(test::layout({"0"})), Instance::unit(s), test::requests({"1"})), Error);
}

TEST_CASE("forced deviation") {
  auto s = test::layout({"0", "2"});
  AssignmentTrace trace = simulate_on(make_greedy_rule(s), s.positions(), std::vector<int>{1, 1},
                                      test::requests({"0.5", "0.5"}), Deviation{0, 1});
  CHECK(trace.assignment == std::vector<ServerIndex>{1, 0});
}

TEST_CASE("surrounding servers") {
  auto s = test::layout({"0", "2", "4"});
  Surrounding a = surrounding_servers(q(1), set_of(3, {0, 2}), s);
  CHECK(a.left == ServerIndex{0});
  CHECK(a.right == ServerIndex{2});

  auto two = test::layout({"0", "2"});
  Surrounding b = surrounding_servers(q(1), set_of(2, {1}), two);
  CHECK_FALSE(b.left);
  CHECK(b.right == ServerIndex{1});

  Surrounding c = surrounding_servers(q(2), set_of(2, {0, 1}), two);
  CHECK(c.left == ServerIndex{1});
  CHECK(c.right == ServerIndex{1});
  CHECK(is_surrounding(1, c, two.positions()));
  CHECK_FALSE(is_surrounding(0, c, two.positions()));
}

TEST_CASE("priority orders") {
  auto s = test::layout({"0", "2", "4"});
  PriorityOrder g = derive_priority_order(make_greedy_rule(s), q("0.5"));
  CHECK(g.consistent);
  CHECK(g.order == std::vector<ServerIndex>{0, 1, 2});
  CHECK(g.subsets_checked == 7);

  auto two = test::layout({"0", "2"});
  CHECK(derive_priority_order(make_ptcp_rule(two), q("0.9")).order == std::vector<ServerIndex>{0, 1});

  auto one = test::layout({"5"});
  CHECK(derive_priority_order(make_ptcp_rule(one), q(0)).order == std::vector<ServerIndex>{0});
}

TEST_CASE("a rule whose choice depends on the free-set size is not MPFS") {
  PriorityRule odd{"odd", 3, [](const Rational&, const ServerSet& f) {
                     auto m = f.members();
                     return f.count() == 2 ? m.back() : m.front();
                   }};
  PriorityOrder o = derive_priority_order(odd, q(0));
  CHECK_FALSE(o.consistent);
  CHECK(o.counterexample);
}

TEST_CASE("greedy and PTCP are MPFS at many positions") {
  auto s = test::layout({"0", "1", "3", "7", "8", "12"});
  for (int i = -4; i <= 56; ++i) {
    Rational r(i, 4);
    CHECK(derive_priority_order(make_ptcp_rule(s), r).consistent);
    CHECK(derive_priority_order(make_greedy_rule(s), r).consistent);
  }
}

TEST_CASE("simulation is deterministic") {
  auto s = test::layout({"0", "1", "3", "7"});
  Instance inst(s, {2, 1, 1, 3});
  auto seq = test::requests({"2", "2", "0.5", "7.5", "6", "6", "1"});
  AssignmentTrace a = simulate(make_ptcp_rule(s), inst, seq);
  AssignmentTrace b = simulate(make_ptcp_rule(s), inst, seq);
  CHECK(a.assignment == b.assignment);
  CHECK(a.total_cost == b.total_cost);
}
