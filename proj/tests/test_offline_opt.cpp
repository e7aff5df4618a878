#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ofal/adversary.hpp"
#include "ofal/offline_opt.hpp"
#include "ofal/random.hpp"
#include "support.hpp"

using namespace ofal;
using test::q;

namespace {

Instance random_instance(Rng& rng, int k_max, int cap_max) {
  auto k = static_cast<std::size_t>(rng.uniform_int(1, k_max));
  std::vector<int> caps;
  for (std::size_t j = 0; j < k; ++j) caps.push_back(static_cast<int>(rng.uniform_int(1, cap_max)));
  return Instance(random_layout(rng, k), caps);
}

bool respects_capacities(const Instance& inst, const std::vector<ServerIndex>& assignment) {
  std::vector<int> used(inst.size(), 0);
  for (ServerIndex j : assignment) {
    if (j >= inst.size() || ++used[j] > inst.capacity(j)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("requests on distinct free servers cost nothing") {
  Instance inst = Instance::unit(test::layout({"0", "2", "5"}));
  auto seq = test::requests({"5", "0", "2"});
  OptResult r = optimal_cost(inst, seq);
  CHECK(r.cost == 0);
  CHECK(r.assignment == std::vector<ServerIndex>{2, 0, 1});
  CHECK(noncrossing_dp_cost(inst, seq) == 0);
}

TEST_CASE("small hand-checked optima") {
  Instance inst = Instance::unit(test::layout({"0", "2"}));
  OptResult one = optimal_bruteforce(inst, test::requests({"0.5"}));
  CHECK(one.cost == q("0.5"));
  CHECK(one.assignment == std::vector<ServerIndex>{0});

  OptResult two = optimal_bruteforce(inst, test::requests({"1", "1"}));
  CHECK(two.cost == 2);
  CHECK(two.assignment == std::vector<ServerIndex>{0, 1});
  CHECK(optimal_cost(inst, test::requests({"1", "1"})).assignment == std::vector<ServerIndex>{0, 1});

  CHECK(optimal_bruteforce(inst, RequestSequence{}).cost == 0);
  CHECK(optimal_cost(inst, RequestSequence{}).cost == 0);
  CHECK(noncrossing_dp_cost(inst, RequestSequence{}) == 0);
  CHECK_THROWS_AS(optimal_cost(inst, test::requests({"1", "1", "1"})), Error);
}

TEST_CASE("single server sums all distances") {
  Instance inst = Instance::uniform(test::layout({"3"}), 4);
  auto seq = test::requests({"0", "5", "3", "-1/2"});
  CHECK(noncrossing_dp_cost(inst, seq) == Rational(3 + 2 + 0) + Rational(7, 2));
  CHECK(optimal_cost(inst, seq).cost == noncrossing_dp_cost(inst, seq));
}

TEST_CASE("exponential adversary optimum") {
  AdversaryParams p;
  p.k = 4;
  p.delta = Rational(1, 100);
  AdversaryCase c = greedy_adversary(p);
  CHECK(optimal_cost(c.instance, c.sequence).cost <= 1 + 4 * p.delta.value());
}

TEST_CASE("feasible assignment count") {
  std::vector<int> unit{1, 1, 1};
  CHECK(feasible_assignment_count(unit, 3) == doctest::Approx(6));
  CHECK(feasible_assignment_count(unit, 2) == doctest::Approx(6));
  std::vector<int> caps{2, 1};
  // Sequences of length 3 over {a, a, b}: 3.
  CHECK(feasible_assignment_count(caps, 3) == doctest::Approx(3));
  CHECK(feasible_assignment_count(caps, 4) == doctest::Approx(0));
  std::vector<int> big(12, 8);
  Instance inst = Instance::uniform(ServerLayout(std::vector<Rational>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), 8);
  RequestSequence seq;
  for (int i = 0; i < 12; ++i) seq.push_back(Rational(i));
  CHECK_THROWS_AS(optimal_bruteforce(inst, seq), Error);
}

TEST_CASE("flow optimum matches exhaustive enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    Instance inst = random_instance(rng, 5, 3);
    auto n = static_cast<std::size_t>(rng.uniform_int(0, std::min<long long>(8, inst.total_capacity())));
    RequestSequence seq = random_sequence(inst, n, rng, Distribution::uniform);
    OptResult flow = optimal_cost(inst, seq);
    OptResult brute = optimal_bruteforce(inst, seq);
    CHECK(flow.cost == brute.cost);
    CHECK(flow.assignment == brute.assignment);
    CHECK(respects_capacities(inst, flow.assignment));
    CHECK(noncrossing_dp_cost(inst, seq) == brute.cost);
    OptResult any = optimal_cost(inst, seq, AssignmentOrder::any);
    CHECK(any.cost == brute.cost);
    CHECK(respects_capacities(inst, any.assignment));
  }
}

TEST_CASE("offline optimum ignores request order") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = random_instance(rng, 6, 4);
    auto n = static_cast<std::size_t>(rng.uniform_int(0, std::min<long long>(20, inst.total_capacity())));
    RequestSequence seq = random_sequence(inst, n, rng, Distribution::near_servers);
    std::vector<Rational> shuffled(seq.begin(), seq.end());
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<long>(n / 3), shuffled.end());
    CHECK(optimal_cost(inst, seq).cost == optimal_cost(inst, RequestSequence(shuffled)).cost);
    CHECK(noncrossing_dp_cost(inst, seq) == noncrossing_dp_cost(inst, RequestSequence(shuffled)));
  }
}

TEST_CASE("zero optimum exactly when every request sits on a server with room") {
  Instance inst(test::layout({"0", "1", "3"}), {2, 1, 1});
  CHECK(noncrossing_dp_cost(inst, test::requests({"0", "0", "1", "3"})) == 0);
  CHECK(noncrossing_dp_cost(inst, test::requests({"1", "1"})) > 0);
  CHECK(noncrossing_dp_cost(inst, test::requests({"0", "0.5"})) > 0);
}

TEST_CASE("integer DP template") {
  std::vector<int> caps{1, 0, 2};
  auto none = noncrossing_min_cost<long>(4, caps, [](std::size_t, std::size_t) { return 1L; });
  CHECK_FALSE(none);
  auto cost = noncrossing_min_cost<long>(3, caps, [](std::size_t t, std::size_t j) { return long(t) * 10 + long(j); });
  // Request 0 -> server 0 (0), requests 1, 2 -> server 2 (12 + 22).
  REQUIRE(cost);
  CHECK(*cost == 34);
}
