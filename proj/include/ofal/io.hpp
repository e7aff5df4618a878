#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ofal/model.hpp"

namespace ofal {

using Json = nlohmann::json;

/// Coordinates are JSON integers, decimal strings, or "p/q" strings.
/// JSON floating literals are read through their shortest decimal form.
Rational coordinate_from_json(const Json& value);
/// Integral values (that fit in 64 bits) as numbers, everything else as "p/q".
Json coordinate_to_json(const Rational& value);

Instance instance_from_json(const Json& doc);
Json instance_to_json(const Instance& inst);

RequestSequence sequence_from_json(const Json& doc);
Json sequence_to_json(const RequestSequence& seq);

Json trace_to_json(const AssignmentTrace& trace);

Instance load_instance(const std::filesystem::path& path);
RequestSequence load_sequence(const std::filesystem::path& path);
Json load_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace ofal
