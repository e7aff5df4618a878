#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ofal/alpha.hpp"
#include "ofal/random.hpp"
#include "support.hpp"

using namespace ofal;
using test::q;

namespace {

// Independent evaluation of span / max gap from a raw list.
Rational by_hand(std::vector<Rational> pts) {
  if (pts.size() < 2) return 0;
  Rational gap = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max<Rational>(gap, pts[i] - pts[i - 1]);
  return (pts.back() - pts.front()) / gap;
}

}  // namespace

TEST_CASE("gap ratio") {
  std::vector<Rational> even{0, 1, 2, 3};
  CHECK(gap_ratio(even) == 3);
  std::vector<Rational> one{0};
  CHECK(gap_ratio(one) == 0);
  std::vector<Rational> expo{0, 2, 4, 8};
  CHECK(gap_ratio(expo) == 2);
}

TEST_CASE("alpha on small layouts") {
  auto expo = test::layout({"0", "2", "4", "8"});
  CHECK(alpha_bruteforce(expo).alpha == 2);
  CHECK(alpha_fast(expo).alpha == 2);
  CHECK(alpha_bruteforce(test::layout({"0", "1"})).alpha == 1);
  auto even = test::layout({"0", "1", "2", "3", "4"});
  CHECK(alpha_bruteforce(even).alpha == 4);
  CHECK(alpha_fast(even).alpha == 4);
  CHECK(alpha_fast(test::layout({"0"})).alpha == 0);
  CHECK(alpha_bruteforce(test::layout({"0"})).alpha == 0);
  CHECK(ptcp_bound(expo) == 5);
}

TEST_CASE("two far pairs: the full set beats either pair") {
  // Subsets of {0,1,10,11} with at least two points, evaluated by hand:
  // pairs give 1; {0,1,10} 10/9; {0,1,11} 11/10; {0,10,11} 11/10;
  // {1,10,11} 10/9; the full set 11/9.
  auto s = test::layout({"0", "1", "10", "11"});
  Metrics fast = alpha_fast(s);
  CHECK(fast.alpha == Rational(11, 9));
  CHECK(fast.witness == std::vector<ServerIndex>{0, 1, 2, 3});
  CHECK(alpha_bruteforce(s).alpha == Rational(11, 9));
  CHECK(by_hand({0, 1, 10, 11}) == Rational(11, 9));
  CHECK(fast.l_value == Rational(11, 9));
}

TEST_CASE("witness is the lexicographically smallest maximizing interval") {
  // {0,1,2} and {2,3,4} both reach 2 at positions 0..2 and 2..4.
  auto s = test::layout({"0", "1", "2", "5", "6", "7"});
  Metrics m = alpha_fast(s);
  CHECK(m.alpha == by_hand({0, 1, 2, 5, 6, 7}));
  CHECK(m.witness.front() == 0);
  std::vector<Rational> pts;
  for (ServerIndex j : m.witness) pts.push_back(s[j]);
  CHECK(by_hand(pts) == m.alpha);
}

TEST_CASE("alpha bruteforce guard") {
  std::vector<Rational> pts;
  for (int i = 0; i < 21; ++i) pts.emplace_back(i);
  CHECK_THROWS_AS(alpha_bruteforce(ServerLayout(pts)), Error);
}

TEST_CASE("fast alpha agrees with subset enumeration") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 10));
    std::vector<Rational> pts{Rational(rng.uniform_int(-4, 4))};
    for (std::size_t j = 1; j < k; ++j) pts.push_back(pts.back() + ratio(rng.uniform_int(1, 12), rng.uniform_int(1, 3)));
    ServerLayout s(pts);
    CHECK(alpha_fast(s).alpha == alpha_bruteforce(s).alpha);
  }
}

TEST_CASE("contiguous closure never lowers the gap ratio") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> pts{0};
    for (int j = 1; j < 8; ++j) pts.push_back(pts.back() + Rational(rng.uniform_int(1, 9)));
    std::uint64_t mask = rng.uniform_int(1, 255);
    std::vector<Rational> subset;
    int first = -1, last = -1;
    for (int j = 0; j < 8; ++j) {
      if (mask & (1u << j)) {
        subset.push_back(pts[j]);
        if (first < 0) first = j;
        last = j;
      }
    }
    std::vector<Rational> closure(pts.begin() + first, pts.begin() + last + 1);
    CHECK(gap_ratio(closure) >= gap_ratio(subset));
  }
}

TEST_CASE("alpha is scale and translation invariant, and grows when a max gap is split") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rational> pts{0};
    for (int j = 1; j < 6; ++j) pts.push_back(pts.back() + Rational(rng.uniform_int(1, 9)));
    Rational a = ratio(rng.uniform_int(1, 7), rng.uniform_int(1, 5));
    Rational b = ratio(rng.uniform_int(-9, 9), 4);
    std::vector<Rational> moved;
    for (const auto& p : pts) moved.push_back(a * p + b);
    Rational alpha = alpha_fast(ServerLayout(pts)).alpha;
    CHECK(alpha_fast(ServerLayout(moved)).alpha == alpha);

    std::size_t widest = 0;
    for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
      if (pts[j + 1] - pts[j] > pts[widest + 1] - pts[widest]) widest = j;
    }
    std::vector<Rational> split = pts;
    split.insert(split.begin() + widest + 1, (pts[widest] + pts[widest + 1]) / 2);
    CHECK(alpha_fast(ServerLayout(split)).alpha >= alpha);
  }
}
