#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ofal/adversary.hpp"
#include "ofal/algorithms.hpp"
#include "ofal/alpha.hpp"
#include "ofal/offline_opt.hpp"
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

TEST_CASE("split tree of two servers puts the critical point at the midpoint") {
  SplitTree tree(test::layout({"0", "2"}));
  const SplitNode& root = tree.root();
  CHECK_FALSE(root.leaf);
  CHECK(root.split == 0);
  CHECK(root.gap == 2);
  CHECK(root.left_span == 0);
  CHECK(root.right_span == 0);
  CHECK(root.offset == 1);
  CHECK(root.critical == 1);
}

TEST_CASE("split tree of {0,1,3}") {
  SplitTree tree(test::layout({"0", "1", "3"}));
  const SplitNode& root = tree.root();
  CHECK(root.split == 1);
  CHECK(root.gap == 2);
  CHECK(root.left_span == 1);
  CHECK(root.right_span == 0);
  // 2 * (0 + 2) / ((1 + 2) + (0 + 2))
  CHECK(root.offset == Rational(4, 5));
  CHECK(root.critical == Rational(9, 5));
  CHECK(tree.critical_points() == std::vector<Rational>{Rational(9, 5), Rational(1, 2)});

  SplitTree leaf(test::layout({"4"}));
  CHECK(leaf.root().leaf);
  CHECK(leaf.critical_points().empty());
}

TEST_CASE("leftmost maximum gap wins ties") {
  SplitTree tree(test::layout({"0", "2", "4"}));
  CHECK(tree.root().split == 0);
}

TEST_CASE("split tree node identities") {
  auto s = test::layout({"0", "1", "3", "4", "9", "10", "11", "17"});
  SplitTree tree(s);
  for (const SplitNode& node : tree.nodes()) {
    if (node.leaf) continue;
    const Rational& a = node.left_span;
    const Rational& b = node.right_span;
    const Rational& D = node.gap;
    const Rational& x = node.offset;
    CHECK(x > 0);
    CHECK(x < D);
    CHECK(s[node.split] < node.critical);
    CHECK(node.critical < s[node.split + 1]);
    std::vector<Rational> interval(s.positions().begin() + node.first, s.positions().begin() + node.last + 1);
    CHECK(D * gap_ratio(interval) == a + b + D);
    Rational target = 2 * (a + b + D) / D + 1;
    CHECK((2 * a + D + x) / (D - x) == target);
    CHECK((2 * b + D + (D - x)) / x == target);
    CHECK(target <= ptcp_bound(s));
  }
}

TEST_CASE("PTCP decisions") {
  auto two = test::layout({"0", "2"});
  SplitTree t2(two);
  CHECK(ptcp_decide(t2, q(1), set_of(2, {0, 1})) == 0);
  CHECK(ptcp_decide(t2, q("1.01"), set_of(2, {0, 1})) == 1);
  CHECK(ptcp_decide(t2, q("0.1"), set_of(2, {1})) == 1);

  auto three = test::layout({"0", "1", "3"});
  SplitTree t3(three);
  auto all = set_of(3, {0, 1, 2});
  // 1.7 <= 9/5 with {0,1} free: left block; then 1.7 > 1/2: server 1.
  CHECK(ptcp_decide(t3, q("1.7"), all) == 1);
  // 1.9 > 9/5 and {3} free: right block.
  CHECK(ptcp_decide(t3, q("1.9"), all) == 2);
  CHECK(ptcp_decide(t3, q("9/5"), all) == 1);
  CHECK(ptcp_decide(t3, q("1.9"), set_of(3, {0, 1})) == 1);
  CHECK(ptcp_decide(t3, q("0"), set_of(3, {2})) == 2);
}

TEST_CASE("greedy decisions") {
  auto s = test::layout({"0", "2", "4", "8"});
  Rational delta(1, 100);
  CHECK(greedy_decide(2 + delta, set_of(4, {0, 1, 2, 3}), s) == 1);
  CHECK(greedy_decide(2 + delta, set_of(4, {0, 2, 3}), s) == 2);
  auto two = test::layout({"0", "2"});
  CHECK(greedy_decide(q(1), set_of(2, {0, 1}), two) == 0);
  CHECK(greedy_decide(q(-5), set_of(2, {1}), two) == 1);
}

TEST_CASE("greedy follows the exponential adversary pattern") {
  for (std::size_t k = 2; k <= 8; ++k) {
    AdversaryParams p;
    p.k = k;
    AdversaryCase c = greedy_adversary(p);
    AssignmentTrace trace = simulate(make_greedy_rule(c.instance.layout()), c.instance, c.sequence);
    for (std::size_t i = 0; i + 1 < k; ++i) CHECK(trace.assignment[i] == i + 1);
    CHECK(trace.assignment[k - 1] == 0);
  }
}

TEST_CASE("greedy cost on the k=4 adversary with delta 1/100") {
  AdversaryParams p;
  p.k = 4;
  p.delta = Rational(1, 100);
  AdversaryCase c = greedy_adversary(p);
  AssignmentTrace trace = simulate(make_greedy_rule(c.instance.layout()), c.instance, c.sequence);
  // (1 - d) + (2 - d) + (4 - d) + (8 + d), replayed by hand.
  CHECK(trace.total_cost == 15 - 2 * p.delta.value());
  CHECK(trace.total_cost >= 15 - 4 * p.delta.value());
  Rational opt = optimal_cost(c.instance, c.sequence).cost;
  CHECK(opt <= 1 + 4 * p.delta.value());
  CHECK(simulate(make_ptcp_rule(c.instance.layout()), c.instance, c.sequence).total_cost <= 5 * opt);
}

TEST_CASE("guarded rule") {
  auto s = test::layout({"0", "1"});
  PriorityRule base = make_ptcp_rule(s);
  GuardedRule g = guard_rule(base, s, q(3), q(1));
  CHECK(g.layout.size() == 3);
  CHECK(g.layout[2] == 4);
  CHECK(g.threshold == 2);
  CHECK(g.rule.server_count == 3);
  // r = s_k + x with S free: base decision.
  CHECK(g.rule(q(2), set_of(3, {0, 1, 2})) == base(q(2), set_of(2, {0, 1})));
  CHECK(g.rule(q(2), set_of(3, {0, 1, 2})) == 1);
  // All of S full.
  CHECK(g.rule(q("0.5"), set_of(3, {2})) == 2);
  // Beyond the threshold.
  CHECK(g.rule(q("2.5"), set_of(3, {0, 1, 2})) == 2);
  // Extra server full.
  CHECK(g.rule(q("2.5"), set_of(3, {0, 1})) == 1);
  CHECK(g.rule(q("3.5"), set_of(3, {0})) == 0);

  CHECK_THROWS_AS(guard_rule(base, s, q(0), q("0.5")), Error);
  CHECK_THROWS_AS(guard_rule(base, s, q(3), q(3)), Error);
  CHECK_THROWS_AS(guard_rule(base, s, q(3), q(0)), Error);
  CHECK(derive_priority_order(g.rule, q("2.5")).consistent);
}
