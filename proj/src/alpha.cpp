#include "ofal/alpha.hpp"

namespace ofal {

Rational gap_ratio(std::span<const Rational> sorted_points) {
  if (sorted_points.size() <= 1) return Rational(0);
  Rational max_gap(0);
  for (std::size_t u = 0; u + 1 < sorted_points.size(); ++u) {
    Rational gap = sorted_points[u + 1] - sorted_points[u];
    if (gap > max_gap) max_gap = gap;
  }
  Rational span = sorted_points.back() - sorted_points.front();
  if (max_gap == 0) return Rational(0);
  return span / max_gap;
}

Metrics alpha_bruteforce(const ServerLayout& layout) {
  const std::size_t k = layout.size();
  if (k > 20) throw Error("alpha_bruteforce: " + std::to_string(k) + " servers exceed enumeration guard of 20");
  Metrics m;
  m.l_value = gap_ratio(layout.positions());
  m.alpha = 0;
  m.witness = k > 0 ? std::vector<ServerIndex>{0} : std::vector<ServerIndex>{};
  std::vector<Rational> subset;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    subset.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (mask & (1u << j)) subset.push_back(layout[j]);
    }
    Rational value = gap_ratio(subset);
    if (value > m.alpha) {
      m.alpha = value;
      m.witness.clear();
      for (std::size_t j = 0; j < k; ++j) {
        if (mask & (1u << j)) m.witness.push_back(j);
      }
    }
  }
  return m;
}

Metrics alpha_fast(const ServerLayout& layout) {
  const std::size_t k = layout.size();
  Metrics m;
  m.l_value = gap_ratio(layout.positions());
  m.alpha = 0;
  m.witness = {0};
  std::size_t best_first = 0;
  std::size_t best_last = 0;
  for (std::size_t i = 0; i < k; ++i) {
    Rational max_gap(0);
    for (std::size_t j = i + 1; j < k; ++j) {
      Rational gap = layout[j] - layout[j - 1];
      if (gap > max_gap) max_gap = gap;
      Rational value = (layout[j] - layout[i]) / max_gap;
      if (value > m.alpha) {
        m.alpha = value;
        best_first = i;
        best_last = j;
      }
    }
  }
  m.witness.clear();
  for (std::size_t j = best_first; j <= best_last; ++j) m.witness.push_back(j);
  return m;
}

Rational aspect_ratio(const ServerLayout& layout) {
  if (layout.size() <= 1) return Rational(0);
  Rational min_gap = layout[1] - layout[0];
  for (std::size_t j = 1; j + 1 < layout.size(); ++j) {
    Rational gap = layout[j + 1] - layout[j];
    if (gap < min_gap) min_gap = gap;
  }
  return layout.diameter() / min_gap;
}

Rational ptcp_bound(const ServerLayout& layout) { return 2 * alpha_fast(layout).alpha + 1; }

}  // namespace ofal
