#include "ofal/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>

namespace ofal {

Rational coordinate_from_json(const Json& value) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned()) return Rational(std::to_string(value.get<std::uint64_t>()), 10);
    return Rational(std::to_string(value.get<std::int64_t>()), 10);
  }
  if (value.is_number_float()) {
    double d = value.get<double>();
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    if (ec != std::errc()) throw Error("unprintable coordinate");
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
  }
  if (value.is_string()) return parse_rational(value.get<std::string>());
  throw Error("coordinate must be a number or string, got " + std::string(value.type_name()));
}

Json coordinate_to_json(const Rational& value) {
  if (value.get_den() == 1 && value.get_num().fits_slong_p()) {
    return Json(static_cast<std::int64_t>(value.get_num().get_si()));
  }
  return Json(format_rational(value));
}

namespace {

const Json& require_array(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw Error(std::string("missing field '") + key + "'");
  const Json& arr = doc.at(key);
  if (!arr.is_array()) throw Error(std::string("field '") + key + "' must be an array");
  return arr;
}

}  // namespace

Instance instance_from_json(const Json& doc) {
  std::vector<Rational> positions;
  for (const Json& v : require_array(doc, "servers")) positions.push_back(coordinate_from_json(v));
  std::vector<int> caps;
  for (const Json& v : require_array(doc, "capacities")) {
    if (!v.is_number_integer()) throw Error("capacities must be integers");
    auto c = v.get<std::int64_t>();
    if (c < 1 || c > std::numeric_limits<int>::max()) throw Error("non-positive capacity " + std::to_string(c));
    caps.push_back(static_cast<int>(c));
  }
  return Instance(ServerLayout(std::move(positions)), std::move(caps));
}

Json instance_to_json(const Instance& inst) {
  Json servers = Json::array();
  for (const Rational& p : inst.layout().positions()) servers.push_back(coordinate_to_json(p));
  Json caps = Json::array();
  for (int c : inst.capacities()) caps.push_back(c);
  return Json{{"servers", servers}, {"capacities", caps}};
}

RequestSequence sequence_from_json(const Json& doc) {
  std::vector<Rational> requests;
  for (const Json& v : require_array(doc, "requests")) requests.push_back(coordinate_from_json(v));
  return RequestSequence(std::move(requests));
}

Json sequence_to_json(const RequestSequence& seq) {
  Json requests = Json::array();
  for (const Rational& r : seq) requests.push_back(coordinate_to_json(r));
  return Json{{"requests", requests}};
}

Json trace_to_json(const AssignmentTrace& trace) {
  Json free_sets = Json::array();
  for (const auto& row : trace.residual) {
    Json snapshot = Json::object();
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] > 0) snapshot[std::to_string(j)] = row[j];
    }
    free_sets.push_back(snapshot);
  }
  Json costs = Json::array();
  for (const Rational& c : trace.step_cost) costs.push_back(format_rational(c));
  return Json{{"assignment", trace.assignment},
              {"free_snapshots", free_sets},
              {"step_cost", costs},
              {"total_cost", format_rational(trace.total_cost)},
              {"total_cost_decimal", format_decimal(trace.total_cost)}};
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("parse error in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(load_json(path)); }

RequestSequence load_sequence(const std::filesystem::path& path) { return sequence_from_json(load_json(path)); }

}  // namespace ofal
