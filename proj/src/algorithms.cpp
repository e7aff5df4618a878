#include "ofal/algorithms.hpp"

namespace ofal {

SplitTree::SplitTree(const ServerLayout& layout) : server_count_(layout.size()) {
  nodes_.reserve(2 * layout.size());
  build(layout, 0, layout.size() - 1);
}

int SplitTree::build(const ServerLayout& layout, ServerIndex first, ServerIndex last) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  SplitNode node;
  node.first = first;
  node.last = last;
  if (first == last) {
    nodes_[static_cast<std::size_t>(id)] = std::move(node);
    return id;
  }
  node.leaf = false;
  node.split = first;
  node.gap = layout[first + 1] - layout[first];
  for (ServerIndex u = first + 1; u < last; ++u) {
    Rational gap = layout[u + 1] - layout[u];
    if (gap > node.gap) {
      node.gap = gap;
      node.split = u;
    }
  }
  node.left_span = layout[node.split] - layout[first];
  node.right_span = layout[last] - layout[node.split + 1];
  const Rational& D = node.gap;
  node.offset = D * (node.right_span + D) / ((node.left_span + D) + (node.right_span + D));
  node.critical = layout[node.split] + node.offset;
  const ServerIndex split = node.split;
  nodes_[static_cast<std::size_t>(id)] = std::move(node);
  int left = build(layout, first, split);
  int right = build(layout, split + 1, last);
  nodes_[static_cast<std::size_t>(id)].left_child = left;
  nodes_[static_cast<std::size_t>(id)].right_child = right;
  return id;
}

std::vector<Rational> SplitTree::critical_points() const {
  std::vector<Rational> out;
  for (const SplitNode& n : nodes_) {
    if (!n.leaf) out.push_back(n.critical);
  }
  return out;
}

ServerIndex ptcp_decide(const SplitTree& tree, const Rational& request, const ServerSet& free) {
  const auto& nodes = tree.nodes();
  const SplitNode* node = &nodes.front();
  while (!node->leaf) {
    bool left_free = free.any_in(node->first, node->split + 1);
    bool right_free = free.any_in(node->split + 1, node->last + 1);
    bool go_left = (request <= node->critical && left_free) || !right_free;
    node = &nodes[static_cast<std::size_t>(go_left ? node->left_child : node->right_child)];
  }
  return node->first;
}

ServerIndex greedy_decide(const Rational& request, const ServerSet& free, const ServerLayout& layout) {
  std::optional<ServerIndex> best;
  Rational best_distance;
  for (ServerIndex j = 0; j < layout.size(); ++j) {
    if (!free.contains(j)) continue;
    Rational d = distance(request, layout[j]);
    if (!best || d < best_distance) {
      best = j;
      best_distance = std::move(d);
    }
  }
  if (!best) throw Error("greedy_decide: no free server");
  return *best;
}

PriorityRule make_ptcp_rule(const ServerLayout& layout) {
  auto tree = std::make_shared<const SplitTree>(layout);
  return PriorityRule{"ptcp", layout.size(), [tree](const Rational& r, const ServerSet& free) {
                        return ptcp_decide(*tree, r, free);
                      }};
}

PriorityRule make_greedy_rule(const ServerLayout& layout) {
  auto shared = std::make_shared<const ServerLayout>(layout);
  return PriorityRule{"greedy", layout.size(), [shared](const Rational& r, const ServerSet& free) {
                        return greedy_decide(r, free, *shared);
                      }};
}

GuardedRule guard_rule(const PriorityRule& base, const ServerLayout& base_layout, const Rational& d,
                       const Rational& x) {
  if (base.server_count != base_layout.size()) throw Error("guard_rule: base rule does not match layout");
  if (!(d > 0)) throw Error("guard_rule: d must be positive");
  if (!(x > 0 && x < d)) throw Error("guard_rule: x must lie in (0, d)");
  std::vector<Rational> positions(base_layout.positions().begin(), base_layout.positions().end());
  positions.push_back(base_layout.back() + d);
  const std::size_t k = base_layout.size();
  Rational threshold = base_layout.back() + x;

  auto inner = base;
  PriorityRule rule{"guarded(" + base.id + ")", k + 1,
                    [inner, k, threshold](const Rational& r, const ServerSet& free) -> ServerIndex {
                      bool base_free = free.any_in(0, k);
                      bool extra_free = free.contains(k);
                      auto delegate = [&] {
                        ServerSet restricted(k);
                        for (ServerIndex j = 0; j < k; ++j) {
                          if (free.contains(j)) restricted.insert(j);
                        }
                        return inner(r, restricted);
                      };
                      if (r <= threshold) return base_free ? delegate() : k;
                      return extra_free ? k : delegate();
                    }};
  return GuardedRule{ServerLayout(std::move(positions)), d, x, std::move(threshold), std::move(rule)};
}

}  // namespace ofal
