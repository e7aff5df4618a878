#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofal/rational.hpp"

namespace ofal {

using ServerIndex = std::size_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Server positions on the line, strictly increasing and non-empty.
class ServerLayout {
 public:
  explicit ServerLayout(std::vector<Rational> positions);

  std::size_t size() const noexcept { return positions_.size(); }
  const Rational& operator[](ServerIndex j) const { return positions_[j]; }
  std::span<const Rational> positions() const noexcept { return positions_; }
  const Rational& front() const { return positions_.front(); }
  const Rational& back() const { return positions_.back(); }
  Rational diameter() const { return back() - front(); }

  bool operator==(const ServerLayout&) const = default;

 private:
  std::vector<Rational> positions_;
};

/// A layout with a positive capacity on every server.
class Instance {
 public:
  Instance(ServerLayout layout, std::vector<int> capacities);

  static Instance unit(ServerLayout layout);
  static Instance uniform(ServerLayout layout, int capacity);

  const ServerLayout& layout() const noexcept { return layout_; }
  std::span<const int> capacities() const noexcept { return capacities_; }
  int capacity(ServerIndex j) const { return capacities_[j]; }
  std::size_t size() const noexcept { return layout_.size(); }
  long long total_capacity() const noexcept;
  bool is_unit() const noexcept;

  bool operator==(const Instance&) const = default;

 private:
  ServerLayout layout_;
  std::vector<int> capacities_;
};

class RequestSequence {
 public:
  RequestSequence() = default;
  explicit RequestSequence(std::vector<Rational> requests) : requests_(std::move(requests)) {}

  std::size_t size() const noexcept { return requests_.size(); }
  bool empty() const noexcept { return requests_.empty(); }
  const Rational& operator[](std::size_t t) const { return requests_[t]; }
  std::span<const Rational> requests() const noexcept { return requests_; }
  auto begin() const { return requests_.begin(); }
  auto end() const { return requests_.end(); }

  void push_back(Rational r) { requests_.push_back(std::move(r)); }

  bool operator==(const RequestSequence&) const = default;

 private:
  std::vector<Rational> requests_;
};

/// Set of server indices over a fixed universe {0..n-1}.
class ServerSet {
 public:
  ServerSet() = default;
  explicit ServerSet(std::size_t universe, bool full = false) : bits_(universe, full) {}

  static ServerSet all(std::size_t universe) { return ServerSet(universe, true); }

  std::size_t universe() const noexcept { return bits_.size(); }
  bool contains(ServerIndex j) const { return j < bits_.size() && bits_[j]; }
  void insert(ServerIndex j) { bits_.at(j) = true; }
  void erase(ServerIndex j) { bits_.at(j) = false; }
  bool empty() const noexcept;
  std::size_t count() const noexcept;
  /// Any member in [first, last).
  bool any_in(ServerIndex first, ServerIndex last) const;
  std::vector<ServerIndex> members() const;

  bool operator==(const ServerSet&) const = default;

 private:
  std::vector<bool> bits_;
};

/// Record of one online run. residual[t] holds the remaining capacity of
/// every server after the first t requests were matched, so residual[0]
/// is the capacity profile and the free set F_t is {j : residual[t][j] > 0}.
struct AssignmentTrace {
  std::vector<ServerIndex> assignment;
  std::vector<std::vector<int>> residual;
  std::vector<Rational> step_cost;
  Rational total_cost;

  std::size_t size() const noexcept { return assignment.size(); }
  ServerSet free_after(std::size_t steps) const;
};

/// A/Opt with the conventions: infinite when Opt = 0 < A, one when both vanish.
class Rate {
 public:
  static Rate of(const Rational& alg_cost, const Rational& opt_cost);
  static Rate finite(Rational value) { return Rate(false, std::move(value)); }
  static Rate infinity() { return Rate(true, Rational(0)); }

  bool is_infinite() const noexcept { return infinite_; }
  /// Only meaningful when finite.
  const Rational& value() const noexcept { return value_; }
  bool within(const Rational& bound) const { return !infinite_ && value_ <= bound; }
  std::string to_string() const;
  std::string to_decimal() const;

  friend bool operator<(const Rate& a, const Rate& b);
  friend bool operator==(const Rate& a, const Rate& b);

 private:
  Rate(bool infinite, Rational value) : infinite_(infinite), value_(std::move(value)) {}
  bool infinite_ = false;
  Rational value_;
};

struct RatioReport {
  Rational alg_cost;
  Rational opt_cost;
  Rate rate = Rate::finite(Rational(1));
  Rational bound;
  std::string instance_id;
  std::string algorithm_id;
  std::uint64_t seed = 0;

  bool within_bound() const { return rate.within(bound); }
};

/// Sum of |r_t - s_{assignment[t]}|. Throws on length mismatch or bad index.
Rational matching_cost(const AssignmentTrace& trace, const Instance& inst, const RequestSequence& seq);

/// Empty when the sequence fits the total capacity, otherwise a description.
std::optional<std::string> validate_pair(const Instance& inst, const RequestSequence& seq);

}  // namespace ofal
