#pragma once

// JSON schemas for set definitions and configurations.
//
// Sets:
//   {"type":"ifs","maps":[{"scale":0.25,"translation":[0,0],
//                          "rotation":[[1,0],[0,1]]}, ...],
//    "outer_ball":{"center":[0.5,0.5],"radius":0.70710678}}   rotation and
//                                                              outer_ball optional
//   {"type":"segment","a":[3,0],"b":[4,0]}
//   {"type":"union","A1":<ifs|segment>,"A2":<ifs|segment>}
//   {"preset":"example-union"}      also "example-a1", "example-a2"
//
// Configurations:
//   {"dim":2,"points":[{"x":[..],"host":"A1","address":[0,3]},
//                      {"x":[..],"host":"A2","t":0.5}, ...]}
//
// Unknown keys are rejected with a ValidationError.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rieszlab/energy.hpp"
#include "rieszlab/geometry.hpp"

namespace rieszlab {

using Json = nlohmann::json;

SetSpec parse_set(const Json& j);
Json to_json(const SetSpec& set);
Json to_json(const Component& set);

/// Resolves a preset name; throws ValidationError for unknown names.
SetSpec preset_set(const std::string& name);

Configuration parse_configuration(const Json& j);
Json to_json(const Configuration& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Content hash of the canonical JSON form of a set (16 hex digits).
std::string set_hash(const SetSpec& set);
std::string set_hash(const Component& set);

/// Reads a whole file; IoError when unreadable.
std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace rieszlab
