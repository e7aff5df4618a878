#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ofal/adversary.hpp"
#include "ofal/offline_opt.hpp"
#include "ofal/permutation.hpp"
#include "support.hpp"

using namespace ofal;
using test::q;

TEST_CASE("single request goes to its nearest server") {
  PrefixOptState state(Instance::unit(test::layout({"0", "2"})));
  CHECK(permutation_step(state, q("1.9")) == 1);
  CHECK(state.cost() == q("0.1"));
}

TEST_CASE("a request on a free server takes it") {
  PrefixOptState state(Instance::unit(test::layout({"0", "2", "5"})));
  CHECK(state.step(q(5)) == 2);
  CHECK(state.cost() == 0);
  CHECK(state.step(q(0)) == 0);
  CHECK(state.cost() == 0);
}

TEST_CASE("the entering server can differ from the prefix match") {
  // After 0.9 -> 0, a second request at 0.1 takes 0 in the optimum and
  // pushes the first onto server 2: server 2 enters.
  PrefixOptState state(Instance::unit(test::layout({"0", "2"})));
  CHECK(state.step(q("0.9")) == 0);
  CHECK(state.step(q("0.1")) == 1);
  CHECK(state.cost() == q("0.1") + q("1.1"));
  CHECK(state.matching() == std::vector<ServerIndex>{1, 0});
}

TEST_CASE("distinct servers cost nothing") {
  Instance inst = Instance::unit(test::layout({"0", "1", "4"}));
  AssignmentTrace t = permutation_run(inst, test::requests({"4", "0", "1"}), true);
  CHECK(t.total_cost == 0);
}

TEST_CASE("no capacity left") {
  PrefixOptState state(Instance::unit(test::layout({"0"})));
  state.step(q(1));
  CHECK_THROWS_AS(state.step(q(1)), Error);
}

TEST_CASE("geometric adversary pattern and rate") {
  for (std::size_t k = 1; k <= 4; ++k) {
    AdversaryParams p;
    p.k = k;
    AdversaryCase c = permutation_adversary(p);
    AssignmentTrace t = permutation_run(c.instance, c.sequence, true);
    for (std::size_t i = 1; i <= k; ++i) {
      CHECK(t.assignment[2 * i - 2] == k - i);
      CHECK(t.assignment[2 * i - 1] == k + i - 1);
    }
    Rational opt = optimal_cost(c.instance, c.sequence).cost;
    Rate rate = Rate::of(t.total_cost, opt);
    CHECK(rate.value() >= Rational(static_cast<long>(4 * k - 1)) - p.epsilon);
  }
}

TEST_CASE("prefix costs stay optimal and one unit enters per step") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto k = static_cast<std::size_t>(rng.uniform_int(1, 5));
    std::vector<int> caps;
    for (std::size_t j = 0; j < k; ++j) caps.push_back(static_cast<int>(rng.uniform_int(1, 3)));
    Instance inst(random_layout(rng, k), caps);
    auto n = static_cast<std::size_t>(rng.uniform_int(1, std::min<long long>(8, inst.total_capacity())));
    RequestSequence seq = random_sequence(inst, n, rng, trial % 2 ? Distribution::uniform : Distribution::near_servers);
    PrefixOptState state(inst);
    RequestSequence prefix;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<int> before = state.used();
      ServerIndex s = state.step(seq[t]);
      prefix.push_back(seq[t]);
      CHECK(state.cost() == optimal_bruteforce(inst, prefix).cost);
      CHECK(matching_cost(AssignmentTrace{state.matching(), {}, {}, 0}, inst, prefix) == state.cost());
      int changed = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (state.used()[j] != before[j]) {
          ++changed;
          CHECK(j == s);
          CHECK(state.used()[j] == before[j] + 1);
        }
      }
      CHECK(changed == 1);
    }
  }
}

TEST_CASE("prefix check on longer sequences") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst(random_layout(rng, 8), std::vector<int>(8, 5));
    RequestSequence seq = random_sequence(inst, 40, rng, Distribution::uniform);
    CHECK_NOTHROW(permutation_run(inst, seq, true));
  }
}
