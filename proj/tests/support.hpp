#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "ofal/model.hpp"

namespace test {

inline ofal::Rational q(const char* text) { return ofal::parse_rational(text); }
inline ofal::Rational q(int value) { return ofal::Rational(value); }

inline ofal::ServerLayout layout(std::initializer_list<const char*> points) {
  std::vector<ofal::Rational> out;
  for (const char* p : points) out.push_back(q(p));
  return ofal::ServerLayout(std::move(out));
}

inline ofal::RequestSequence requests(std::initializer_list<const char*> points) {
  ofal::RequestSequence out;
  for (const char* p : points) out.push_back(q(p));
  return out;
}

}  // namespace test
