#include "autointent/trajectory_io.hpp"

#include <fstream>

#include "autointent/errors.hpp"

namespace autointent {
namespace io {

namespace {

std::string join_path(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

}  // namespace

json to_json(const Element& e) {
  json attrs = json::array();
  for (const auto& [name, value] : e.attributes) attrs.push_back(json::array({name, value}));
  return json{{"element_id", e.element_id},
              {"tag", e.tag},
              {"text", e.text},
              {"attributes", std::move(attrs)},
              {"rank_score", e.rank_score}};
}

json to_json(const Observation& o) {
  json cands = json::array();
  for (const auto& e : o.candidates) cands.push_back(to_json(e));
  json j{{"task", o.task}, {"step_index", o.step_index}, {"candidates", std::move(cands)}};
  if (o.page_meta) j["page_meta"] = *o.page_meta;
  return j;
}

json to_json(const Action& a) {
  return json{{"kind", std::string(to_string(a.kind))}, {"element_id", a.element_id}, {"value", a.value}};
}

json to_json(const Step& s) {
  return json{{"observation", to_json(s.observation)},
              {"action", to_json(s.action)},
              {"gt_element_ids", json(std::vector<std::string>(s.gt_element_ids.begin(), s.gt_element_ids.end()))}};
}

json to_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back(to_json(s));
  return json{{"schema", kSchemaVersion},
              {"task_id", t.task_id},
              {"split_tag", std::string(to_string(t.split_tag))},
              {"steps", std::move(steps)}};
}

json to_json(const AnnotatedTrajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json js = to_json(s.step);
    js["intent"] = s.intent.text();
    steps.push_back(std::move(js));
  }
  return json{{"schema", kSchemaVersion},
              {"task_id", t.task_id},
              {"split_tag", std::string(to_string(t.split_tag))},
              {"steps", std::move(steps)}};
}

const json& require(const json& obj, std::string_view key, std::size_t line, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(line, path.empty() ? "record" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(line, join_path(path, key), "missing field");
  return *it;
}

std::string require_string(const json& obj, std::string_view key, std::size_t line, const std::string& path) {
  const json& v = require(obj, key, line, path);
  if (!v.is_string()) throw SchemaError(line, join_path(path, key), "expected a string");
  return v.get<std::string>();
}

long long require_int(const json& obj, std::string_view key, std::size_t line, const std::string& path) {
  const json& v = require(obj, key, line, path);
  if (!v.is_number_integer()) throw SchemaError(line, join_path(path, key), "expected an integer");
  return v.get<long long>();
}

double require_number(const json& obj, std::string_view key, std::size_t line, const std::string& path) {
  const json& v = require(obj, key, line, path);
  if (!v.is_number()) throw SchemaError(line, join_path(path, key), "expected a number");
  return v.get<double>();
}

void require_schema(const json& obj, std::size_t line) {
  std::string schema = require_string(obj, "schema", line, "");
  if (schema != kSchemaVersion) throw SchemaError(line, "schema", "unsupported schema '" + schema + "'");
}

Element element_from_json(const json& j, std::size_t line, const std::string& path) {
  Element e;
  e.element_id = require_string(j, "element_id", line, path);
  e.tag = require_string(j, "tag", line, path);
  e.text = j.contains("text") ? require_string(j, "text", line, path) : std::string();
  e.rank_score = require_number(j, "rank_score", line, path);
  if (j.contains("attributes")) {
    const json& attrs = j.at("attributes");
    const std::string apath = join_path(path, "attributes");
    if (!attrs.is_array()) throw SchemaError(line, apath, "expected an array");
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      const json& pair = attrs[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
        throw SchemaError(line, apath + "[" + std::to_string(i) + "]", "expected [name, value]");
      e.attributes.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  return e;
}

Observation observation_from_json(const json& j, std::size_t line, const std::string& path) {
  Observation o;
  o.task = require_string(j, "task", line, path);
  o.step_index = static_cast<int>(require_int(j, "step_index", line, path));
  const json& cands = require(j, "candidates", line, path);
  const std::string cpath = join_path(path, "candidates");
  if (!cands.is_array()) throw SchemaError(line, cpath, "expected an array");
  for (std::size_t i = 0; i < cands.size(); ++i) {
    o.candidates.push_back(element_from_json(cands[i], line, cpath + "[" + std::to_string(i) + "]"));
  }
  sort_candidates(o.candidates);
  if (j.contains("page_meta") && !j.at("page_meta").is_null()) o.page_meta = require_string(j, "page_meta", line, path);
  return o;
}

Action action_from_json(const json& j, std::size_t line, const std::string& path) {
  Action a;
  std::string kind = require_string(j, "kind", line, path);
  auto parsed = parse_action_kind(kind);
  if (!parsed) throw SchemaError(line, join_path(path, "kind"), "unknown action kind '" + kind + "'");
  a.kind = *parsed;
  a.element_id = require_string(j, "element_id", line, path);
  a.value = j.contains("value") ? require_string(j, "value", line, path) : std::string();
  return a;
}

Step step_from_json(const json& j, std::size_t line, const std::string& path) {
  Step s;
  s.observation = observation_from_json(require(j, "observation", line, path), line, join_path(path, "observation"));
  s.action = action_from_json(require(j, "action", line, path), line, join_path(path, "action"));
  const json& gt = require(j, "gt_element_ids", line, path);
  if (!gt.is_array()) throw SchemaError(line, join_path(path, "gt_element_ids"), "expected an array");
  for (const auto& id : gt) {
    if (!id.is_string()) throw SchemaError(line, join_path(path, "gt_element_ids"), "expected strings");
    s.gt_element_ids.insert(id.get<std::string>());
  }
  return s;
}

namespace {

template <typename T>
void validate_record(const T& value, std::size_t line) {
  try {
    validate(value);
  } catch (const ValidationError& e) {
    throw SchemaError(line, "record", e.what());
  }
}

SplitTag split_from_json(const json& j, std::size_t line) {
  std::string tag = require_string(j, "split_tag", line, "");
  auto parsed = parse_split_tag(tag);
  if (!parsed) throw SchemaError(line, "split_tag", "unknown split '" + tag + "'");
  return *parsed;
}

}  // namespace

Trajectory trajectory_from_json(const json& j, std::size_t line) {
  require_schema(j, line);
  Trajectory t;
  t.task_id = require_string(j, "task_id", line, "");
  t.split_tag = split_from_json(j, line);
  const json& steps = require(j, "steps", line, "");
  if (!steps.is_array()) throw SchemaError(line, "steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    t.steps.push_back(step_from_json(steps[i], line, "steps[" + std::to_string(i) + "]"));
  }
  validate_record(t, line);
  return t;
}

AnnotatedTrajectory annotated_from_json(const json& j, std::size_t line) {
  require_schema(j, line);
  AnnotatedTrajectory t;
  t.task_id = require_string(j, "task_id", line, "");
  t.split_tag = split_from_json(j, line);
  const json& steps = require(j, "steps", line, "");
  if (!steps.is_array()) throw SchemaError(line, "steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string path = "steps[" + std::to_string(i) + "]";
    Step s = step_from_json(steps[i], line, path);
    std::string raw = require_string(steps[i], "intent", line, path);
    try {
      t.steps.push_back(AnnotatedStep{std::move(s), parse_canonical_intent(raw)});
    } catch (const DataError& e) {
      throw SchemaError(line, path + ".intent", e.what());
    }
  }
  validate_record(t, line);
  return t;
}

void for_each_record(const std::filesystem::path& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(lineno, "record", std::string("malformed JSON: ") + e.what());
    }
    fn(j, lineno);
  }
}

void write_records(const std::filesystem::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << records[i].dump(-1, ' ', false, json::error_handler_t::strict) << '\n';
    if (!out) throw DataError("write failed at record " + std::to_string(i) + " of " + path.string());
  }
}

}  // namespace io

namespace {

template <typename T>
void save_impl(const std::vector<T>& items, const std::filesystem::path& path, std::string_view fingerprint) {
  std::vector<io::json> records;
  records.reserve(items.size());
  for (const auto& t : items) {
    io::json j = io::to_json(t);
    if (!fingerprint.empty()) j["config_fingerprint"] = fingerprint;
    records.push_back(std::move(j));
  }
  io::write_records(path, records);
}

}  // namespace

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  std::vector<Trajectory> out;
  io::for_each_record(path, [&](const io::json& j, std::size_t line) { out.push_back(io::trajectory_from_json(j, line)); });
  return out;
}

void save_trajectories(const std::vector<Trajectory>& trajectories, const std::filesystem::path& path,
                       std::string_view config_fingerprint) {
  save_impl(trajectories, path, config_fingerprint);
}

std::vector<AnnotatedTrajectory> load_annotated(const std::filesystem::path& path) {
  std::vector<AnnotatedTrajectory> out;
  io::for_each_record(path, [&](const io::json& j, std::size_t line) { out.push_back(io::annotated_from_json(j, line)); });
  return out;
}

void save_annotated(const std::vector<AnnotatedTrajectory>& trajectories, const std::filesystem::path& path,
                    std::string_view config_fingerprint) {
  save_impl(trajectories, path, config_fingerprint);
}

}  // namespace autointent
