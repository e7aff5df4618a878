#pragma once

#include <vector>

#include "ofal/engine.hpp"

namespace ofal {

/// Optimal matching of the requests seen so far, kept optimal by one
/// shortest augmenting path per arrival. Node potentials keep reduced
/// costs non-negative so every search is a Dijkstra over exact rationals.
class PrefixOptState {
 public:
  explicit PrefixOptState(Instance inst);

  /// Adds a request and returns the server whose used capacity grew by one.
  /// Among equally cheap augmentations the leftmost terminal server wins.
  ServerIndex step(const Rational& request);

  const Instance& instance() const noexcept { return inst_; }
  /// Cost of the current optimal matching of the prefix.
  const Rational& cost() const noexcept { return cost_; }
  /// Current optimal server of each prefix request.
  const std::vector<ServerIndex>& matching() const noexcept { return matching_; }
  const std::vector<int>& used() const noexcept { return used_; }

 private:
  Instance inst_;
  std::vector<Rational> requests_;
  std::vector<std::vector<Rational>> costs_;  // costs_[q][j] = |r_q - s_j|
  std::vector<ServerIndex> matching_;
  std::vector<int> used_;
  std::vector<Rational> server_potential_;
  std::vector<Rational> request_potential_;
  Rational cost_{0};
};

/// Functional form of a single step.
inline ServerIndex permutation_step(PrefixOptState& state, const Rational& request) { return state.step(request); }

/// Runs Permutation over the whole sequence. With check_prefix set, every
/// prefix cost is compared against the offline optimum and a mismatch throws.
AssignmentTrace permutation_run(const Instance& inst, const RequestSequence& seq, bool check_prefix = false);

}  // namespace ofal
