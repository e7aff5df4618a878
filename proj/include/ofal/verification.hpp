#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ofal/algorithms.hpp"
#include "ofal/io.hpp"
#include "ofal/offline_opt.hpp"

namespace ofal {

struct Reproducer {
  Instance instance;
  RequestSequence sequence;
  std::uint64_t seed = 0;
  std::string algorithm;
};

struct Violation {
  std::string message;
  std::optional<Reproducer> reproducer;
};

struct PropertyReport {
  std::string property;
  std::size_t trials = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string verdict() const { return ok() ? "pass" : "fail"; }
  void absorb(PropertyReport other);
};

Json reproducer_to_json(const Reproducer& rep);
Json report_to_json(const PropertyReport& report);

/// Every matched server was a surrounding server of its request at that step.
PropertyReport check_surrounding_oriented(const AssignmentTrace& trace, const ServerLayout& layout,
                                          const RequestSequence& seq);

/// Random closer sequences: every request moves a random fraction of the way
/// toward its matched server; assignments must not change.
PropertyReport check_faithful(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq,
                              std::size_t trials, std::uint64_t seed = 1);

/// Per step: does the request lie between the online and the optimal server.
std::vector<bool> opposite_steps(const AssignmentTrace& trace, const OptResult& opt, const ServerLayout& layout,
                                 const RequestSequence& seq);
bool is_opposite(const AssignmentTrace& trace, const OptResult& opt, const ServerLayout& layout,
                 const RequestSequence& seq);
/// Non-opposite steps are reported as violations.
PropertyReport check_opposite(const AssignmentTrace& trace, const OptResult& opt, const ServerLayout& layout,
                              const RequestSequence& seq);

/// Rate of the rule against the exact optimum, with bound 2 alpha(S) + 1.
RatioReport check_ratio_bound(const PriorityRule& rule, const Instance& inst, const RequestSequence& seq);

/// max{2 alpha(S) + 1, (2d - x)/x, (2 Delta + d + x)/(d - x)}.
Rational adx_bound(const ServerLayout& base_layout, const Rational& d, const Rational& x);

struct AdxCheck {
  PropertyReport report;
  Rational bound;
  Rate rate = Rate::finite(Rational(1));
  bool opposite = false;
  std::size_t beyond_threshold = 0;  // requests in (s_k + x, s_k + d]
};

/// Runs the guarded rule on `inst` (a layout over S plus the extra server)
/// and checks the cost bound. For unit-capacity opposite sequences it also
/// checks that at most two requests fall beyond the threshold, and, for
/// full sequences of k + 1 requests, that a single such request keeps the
/// rate within 2 alpha(S) + 1.
AdxCheck check_adx_bound(const PriorityRule& base, const ServerLayout& base_layout, const Rational& d,
                         const Rational& x, const Instance& inst, const RequestSequence& seq);

struct SearchResult {
  Rate worst = Rate::finite(Rational(1));
  RequestSequence witness;
  std::size_t sequences = 0;
  std::size_t bound_violations = 0;
  std::optional<RequestSequence> first_violation;
};

/// Every sequence of length 1..n_max over the grid points (capped by the
/// total capacity). The rule must be MPFS at every grid point; its derived
/// priority orders drive an exact integer-scaled replay. `bound`, when set,
/// counts sequences whose rate exceeds it. Throws when the number of
/// sequences exceeds `budget`.
SearchResult grid_search(const PriorityRule& rule, const Instance& inst, std::span<const Rational> grid,
                         std::size_t n_max, std::optional<Rational> bound = std::nullopt, unsigned workers = 1,
                         double budget = 2e9);

struct CapacityProbe {
  PropertyReport report;
  Rate unit_worst = Rate::finite(Rational(1));
  std::vector<std::pair<int, Rate>> capacitated_worst;  // uniform capacity -> worst rate
};

/// Worst grid rate with uniform capacities 2..max_capacity must not exceed
/// the worst with unit capacities. Unit runs use n <= k, capacitated runs
/// n <= min(n_max, total capacity).
CapacityProbe capacity_insensitivity_probe(const PriorityRule& rule, const ServerLayout& layout, int max_capacity,
                                           std::span<const Rational> grid, std::size_t n_max, unsigned workers = 1);

}  // namespace ofal
