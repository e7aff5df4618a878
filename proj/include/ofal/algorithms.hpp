#pragma once

#include <memory>
#include <vector>

#include "ofal/engine.hpp"

namespace ofal {

/// One node of the PTCP recursion over the server interval [first, last].
/// Internal nodes split after server `split` (S1 = [first, split],
/// S2 = [split+1, last]) at a largest adjacent gap.
struct SplitNode {
  ServerIndex first = 0;
  ServerIndex last = 0;
  bool leaf = true;
  ServerIndex split = 0;
  Rational gap;          // D
  Rational left_span;    // Δ1 = s_split - s_first
  Rational right_span;   // Δ2 = s_last - s_{split+1}
  Rational offset;       // x = D (Δ2 + D) / ((Δ1 + D) + (Δ2 + D))
  Rational critical;     // s_split + x
  int left_child = -1;
  int right_child = -1;
};

class SplitTree {
 public:
  /// Splits at the leftmost largest gap until every node is a single server.
  explicit SplitTree(const ServerLayout& layout);

  const std::vector<SplitNode>& nodes() const noexcept { return nodes_; }
  const SplitNode& root() const { return nodes_.front(); }
  std::size_t server_count() const noexcept { return server_count_; }
  /// Critical points of all internal nodes, in node order.
  std::vector<Rational> critical_points() const;

 private:
  int build(const ServerLayout& layout, ServerIndex first, ServerIndex last);

  std::vector<SplitNode> nodes_;
  std::size_t server_count_ = 0;
};

inline SplitTree build_split_tree(const ServerLayout& layout) { return SplitTree(layout); }

/// Descends left when (r <= critical and S1 has a free server) or S2 has none.
ServerIndex ptcp_decide(const SplitTree& tree, const Rational& request, const ServerSet& free);

/// Nearest free server; exact ties go to the left one.
ServerIndex greedy_decide(const Rational& request, const ServerSet& free, const ServerLayout& layout);

PriorityRule make_ptcp_rule(const ServerLayout& layout);
PriorityRule make_greedy_rule(const ServerLayout& layout);

/// A_{d,x}: the base rule on S plus an extra server d to the right of s_k;
/// requests up to s_k + x go to S unless S is full, requests beyond go to
/// the extra server unless it is full.
struct GuardedRule {
  ServerLayout layout;  // S with the extra server appended
  Rational d;
  Rational x;
  Rational threshold;   // s_k + x
  PriorityRule rule;
};

GuardedRule guard_rule(const PriorityRule& base, const ServerLayout& base_layout, const Rational& d,
                       const Rational& x);

}  // namespace ofal
