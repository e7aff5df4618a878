#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ofal/engine.hpp"
#include "ofal/random.hpp"

namespace ofal {

enum class AdversaryFamily { greedy_exp, permutation_geo, random, grid };

struct AdversaryParams {
  std::size_t k = 2;
  Rational epsilon{1, 10};
  std::optional<Rational> delta;  // default derived from epsilon
  std::vector<int> capacities;    // empty: every server gets `capacity`
  int capacity = 1;
  AdversaryFamily family = AdversaryFamily::greedy_exp;
};

struct AdversaryCase {
  Instance instance;
  RequestSequence sequence;
  Rational delta;
  Rational epsilon;
  std::string id;
  std::size_t prefill = 0;  // leading requests placed on servers
};

/// Largest 10^-m with k delta / (1 + k delta) <= epsilon 2^-k.
Rational greedy_delta(std::size_t k, const Rational& epsilon);
/// Largest 10^-m with delta^k + delta (4k - 1) < epsilon and 1/(1 - delta) < 1 + epsilon/2.
Rational permutation_delta(std::size_t k, const Rational& epsilon);
bool permutation_delta_valid(std::size_t k, const Rational& epsilon, const Rational& delta);

/// Servers 0, 2, 4, ..., 2^(k-1); requests 2^(i-1) + delta after the pre-fill.
AdversaryCase greedy_adversary(const AdversaryParams& params);

/// 2k servers at +-(1 - delta^i)/(1 - delta); requests just left of the
/// right-side gap midpoints alternate with requests just right of the
/// left-side gap midpoints. The last one sits just right of s_1.
AdversaryCase permutation_adversary(const AdversaryParams& params);

enum class Distribution {
  uniform,          // uniform over the hull widened by one mean gap
  near_servers,     // server positions plus small noise
  opposite_biased,  // nudged between the PTCP choice and the optimal server
};

Distribution parse_distribution(const std::string& name);

/// One seeded sequence of length n (n <= total capacity). The
/// opposite-biased pilot defaults to PTCP on the instance layout.
RequestSequence random_sequence(const Instance& inst, std::size_t n, Rng& rng, Distribution dist,
                                const PriorityRule* pilot = nullptr);

/// Reproducible stream of sequences: the t-th sequence depends only on
/// (seed, t).
class SequenceStream {
 public:
  SequenceStream(Instance inst, std::size_t n, std::uint64_t seed, Distribution dist)
      : inst_(std::move(inst)), n_(n), rng_(seed), dist_(dist) {}
  RequestSequence next();

 private:
  Instance inst_;
  std::size_t n_;
  Rng rng_;
  Distribution dist_;
};

/// Random strictly increasing layout of k servers: integer gaps 1..gap_max
/// with occasional repeated gaps, shifted by a random offset.
ServerLayout random_layout(Rng& rng, std::size_t k, int gap_max = 12);

/// Server positions, split-tree critical points and adjacent midpoints,
/// each also shifted by +-epsilon where epsilon is the smallest gap / 16.
std::vector<Rational> candidate_grid(const ServerLayout& layout);

/// All sequences of exactly n requests over the grid points, in
/// lexicographic index order. A partition (worker w of W) visits only the
/// sequences whose first index is congruent to w modulo W.
class GridSequences {
 public:
  GridSequences(std::vector<Rational> points, std::size_t n, double budget = 1e8);
  double count() const noexcept { return count_; }
  void partition(unsigned worker, unsigned workers);
  bool next(RequestSequence& out);

 private:
  std::vector<Rational> points_;
  std::size_t n_;
  double count_;
  unsigned worker_ = 0;
  unsigned workers_ = 1;
  std::vector<std::size_t> index_;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace ofal
