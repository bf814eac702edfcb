#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "autointent/types.hpp"

namespace autointent {

/// Value of the required `schema` field in every record.
inline constexpr std::string_view kSchemaVersion = "auto-intent/v1";

namespace io {

using nlohmann::json;

json to_json(const Element& e);
json to_json(const Observation& o);
json to_json(const Action& a);
json to_json(const Step& s);
json to_json(const Trajectory& t);
json to_json(const AnnotatedTrajectory& t);

// Parsers report failures as SchemaError(line, path). `path` is the dotted
// prefix of the value being parsed.
Element element_from_json(const json& j, std::size_t line, const std::string& path);
Observation observation_from_json(const json& j, std::size_t line, const std::string& path);
Action action_from_json(const json& j, std::size_t line, const std::string& path);
Step step_from_json(const json& j, std::size_t line, const std::string& path);
Trajectory trajectory_from_json(const json& j, std::size_t line);
AnnotatedTrajectory annotated_from_json(const json& j, std::size_t line);

// Typed field accessors shared by every record reader.
const json& require(const json& obj, std::string_view key, std::size_t line, const std::string& path);
std::string require_string(const json& obj, std::string_view key, std::size_t line, const std::string& path);
long long require_int(const json& obj, std::string_view key, std::size_t line, const std::string& path);
double require_number(const json& obj, std::string_view key, std::size_t line, const std::string& path);
void require_schema(const json& obj, std::size_t line);

/// Calls `fn(record, line)` for each non-blank line; malformed JSON is a SchemaError.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const json&, std::size_t)>& fn);

/// Writes one compact record per line. Keys are emitted sorted, so output
/// is deterministic.
void write_records(const std::filesystem::path& path, const std::vector<json>& records);

}  // namespace io

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);
void save_trajectories(const std::vector<Trajectory>& trajectories, const std::filesystem::path& path,
                       std::string_view config_fingerprint = {});

/// Annotated files carry an `intent` on every step.
std::vector<AnnotatedTrajectory> load_annotated(const std::filesystem::path& path);
void save_annotated(const std::vector<AnnotatedTrajectory>& trajectories, const std::filesystem::path& path,
                    std::string_view config_fingerprint = {});

}  // namespace autointent
