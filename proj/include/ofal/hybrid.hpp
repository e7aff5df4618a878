#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ofal/algorithms.hpp"
#include "ofal/engine.hpp"

namespace ofal {

/// Unit-capacity view of an instance: server j becomes c(j) replicas at the
/// same position. The expanded rule asks the base rule which original
/// server to use and takes its lowest-index free replica.
struct UnitExpansion {
  std::vector<Rational> positions;
  std::vector<ServerIndex> owner;
  std::vector<ServerIndex> first_slot;  // original server -> its first replica
  PriorityRule rule;
};

UnitExpansion expand_to_unit(const PriorityRule& rule, const Instance& inst);

/// A and the hybrid H_{i,s} over the same unit-capacity servers, with the
/// chains a_t (free only for A) and h_t (free only for H) for t = i..t*.
/// Steps are 0-based; chain entry u belongs to step i + u.
struct HybridTrace {
  std::vector<Rational> positions;
  RequestSequence sequence;
  AssignmentTrace base;
  AssignmentTrace hybrid;
  std::size_t deviation_step = 0;
  ServerIndex forced_server = 0;
  std::vector<ServerIndex> a_chain;
  std::vector<ServerIndex> h_chain;
  std::size_t terminal_step = 0;  // t*
  bool merged = false;            // free sets coincide from t*+1 on
  std::vector<std::string> shape_violations;
};

/// `server` names an original server; for capacitated instances its first
/// free replica is forced. Throws if it is not free before the step or
/// coincides in position with A's own choice.
HybridTrace run_hybrid(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq, std::size_t step,
                       ServerIndex server);

/// Free-set differences are single servers up to t* and empty afterwards;
/// a_i = s and h_i = A's choice.
std::vector<std::string> check_difference_shape(const HybridTrace& ht);

/// Transition rules: one chain moves per step, a moving chain follows the
/// matches of A and H, and the merge step matches a_{t*} and h_{t*}.
std::vector<std::string> check_transition_rules(const HybridTrace& ht);

struct ChainCheck {
  bool precondition_met = false;  // no free server between s_A(r_i) and s
  std::vector<std::string> violations;
};

/// Monotone chains moving apart, no common free server between a_t and h_t.
ChainCheck check_chain_monotone(const HybridTrace& ht);

struct C3Report {
  std::size_t trials = 0;
  std::size_t hybrids = 0;
  std::size_t fallback_hybrids = 0;  // single surrounding server: neighbours of A's choice used
  std::vector<std::string> violations;
  bool vacuous = false;
  bool ok() const { return violations.empty(); }
};

/// Samples full-length unit-capacity sequences and every deviation of a
/// request to its other surrounding server; asserts
/// |h_{t*} - r_i| <= alpha(S) |r_i - a_i|.
C3Report check_c3(const PriorityRule& rule, const ServerLayout& layout, std::size_t trials, std::uint64_t seed);

struct ShiftCheck {
  bool applicable = false;  // opposite, rightmost request strictly left of s*
  bool holds = true;
  Rational cost_drop;       // A(sigma) - A(sigma*)
  Rational allowance;       // (2 alpha(S) + 1) |r_i - s*|
};

/// Moves the rightmost request of a unit-capacity opposite sequence for
/// A_{d,x} onto s*, the rightmost free base server at its arrival, and
/// compares the cost drop with (2 alpha(S) + 1) |r_i - s*|.
ShiftCheck check_rightmost_shift(const GuardedRule& guarded, const ServerLayout& base_layout,
                                 const RequestSequence& seq);

}  // namespace ofal
