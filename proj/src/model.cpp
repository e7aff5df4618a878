#include "ofal/model.hpp"

#include <algorithm>
#include <numeric>

namespace ofal {

ServerLayout::ServerLayout(std::vector<Rational> positions) : positions_(std::move(positions)) {
  if (positions_.empty()) throw Error("server layout must be non-empty");
  for (std::size_t j = 0; j + 1 < positions_.size(); ++j) {
    if (!(positions_[j] < positions_[j + 1])) {
      throw Error("server positions unsorted or duplicate at index " + std::to_string(j + 1) + " (" +
                  format_rational(positions_[j]) + " then " + format_rational(positions_[j + 1]) + ")");
    }
  }
}

Instance::Instance(ServerLayout layout, std::vector<int> capacities)
    : layout_(std::move(layout)), capacities_(std::move(capacities)) {
  if (capacities_.size() != layout_.size()) {
    throw Error("capacity count " + std::to_string(capacities_.size()) + " does not match " +
                std::to_string(layout_.size()) + " servers");
  }
  for (std::size_t j = 0; j < capacities_.size(); ++j) {
    if (capacities_[j] < 1) throw Error("non-positive capacity at server " + std::to_string(j));
  }
}

Instance Instance::unit(ServerLayout layout) { return uniform(std::move(layout), 1); }

Instance Instance::uniform(ServerLayout layout, int capacity) {
  std::vector<int> caps(layout.size(), capacity);
  return Instance(std::move(layout), std::move(caps));
}

long long Instance::total_capacity() const noexcept {
  return std::accumulate(capacities_.begin(), capacities_.end(), 0LL);
}

bool Instance::is_unit() const noexcept {
  return std::all_of(capacities_.begin(), capacities_.end(), [](int c) { return c == 1; });
}

bool ServerSet::empty() const noexcept {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

std::size_t ServerSet::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

bool ServerSet::any_in(ServerIndex first, ServerIndex last) const {
  last = std::min(last, bits_.size());
  for (ServerIndex j = first; j < last; ++j) {
    if (bits_[j]) return true;
  }
  return false;
}

std::vector<ServerIndex> ServerSet::members() const {
  std::vector<ServerIndex> out;
  for (ServerIndex j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) out.push_back(j);
  }
  return out;
}

ServerSet AssignmentTrace::free_after(std::size_t steps) const {
  const auto& row = residual.at(steps);
  ServerSet free(row.size());
  for (ServerIndex j = 0; j < row.size(); ++j) {
    if (row[j] > 0) free.insert(j);
  }
  return free;
}

Rate Rate::of(const Rational& alg_cost, const Rational& opt_cost) {
  if (opt_cost > 0) return Rate(false, alg_cost / opt_cost);
  if (alg_cost > 0) return infinity();
  return Rate(false, Rational(1));
}

std::string Rate::to_string() const { return infinite_ ? "inf" : format_rational(value_); }

std::string Rate::to_decimal() const { return infinite_ ? "inf" : format_decimal(value_, 12); }

bool operator<(const Rate& a, const Rate& b) {
  if (a.infinite_) return false;
  if (b.infinite_) return true;
  return a.value_ < b.value_;
}

bool operator==(const Rate& a, const Rate& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

Rational matching_cost(const AssignmentTrace& trace, const Instance& inst, const RequestSequence& seq) {
  if (trace.assignment.size() != seq.size()) {
    throw Error("trace has " + std::to_string(trace.assignment.size()) + " assignments for " +
                std::to_string(seq.size()) + " requests");
  }
  Rational total(0);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    ServerIndex j = trace.assignment[t];
    if (j >= inst.size()) throw Error("assignment references server " + std::to_string(j) + " out of range");
    total += distance(seq[t], inst.layout()[j]);
  }
  return total;
}

std::optional<std::string> validate_pair(const Instance& inst, const RequestSequence& seq) {
  auto n = static_cast<long long>(seq.size());
  if (n > inst.total_capacity()) {
    return std::to_string(n) + " requests exceed total capacity " + std::to_string(inst.total_capacity());
  }
  return std::nullopt;
}

}  // namespace ofal
