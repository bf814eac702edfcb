#include "autointent/run_config.hpp"

#include <fstream>
#include <set>

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent {

namespace {

#define AUTOINTENT_CONFIG_FIELDS(X) \
  X(input)                          \
  X(output)                         \
  X(prompts)                        \
  X(script)                         \
  X(hint_map)                       \
  X(train)                          \
  X(predictor)                      \
  X(backend)                        \
  X(endpoint)                       \
  X(model)                          \
  X(api_key_env)                    \
  X(requests_per_minute)            \
  X(timeout_s)                      \
  X(allow_remote)                   \
  X(predictor_backend)              \
  X(predictor_endpoint)             \
  X(smoothing)                      \
  X(neighbor_count)                 \
  X(similarity)                     \
  X(embedding_endpoint)             \
  X(embedding_model)                \
  X(threshold)                      \
  X(k_max)                          \
  X(view_size)                      \
  X(k)                              \
  X(beam_width)                     \
  X(seed)                           \
  X(mode)                           \
  X(hint_mode)                      \
  X(intent_history)                 \
  X(conditions)                     \
  X(samples_per_transition)         \
  X(pool)                           \
  X(holdout)                        \
  X(workers)

void require_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::vector<std::string> names(allowed.begin(), allowed.end());
  throw ConfigError(key + " must be one of " + text::join(names, "|") + ", got '" + value + "'");
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  std::set<std::string> known;
#define X(name) known.insert(#name);
  AUTOINTENT_CONFIG_FIELDS(X)
#undef X
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
#define X(name) \
  if (j.contains(#name)) j.at(#name).get_to(c.name);
    AUTOINTENT_CONFIG_FIELDS(X)
#undef X
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not JSON: " + e.what());
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
#define X(name) j[#name] = name;
  AUTOINTENT_CONFIG_FIELDS(X)
#undef X
  return j;
}

void RunConfig::validate() const {
  require_one_of("backend", backend, {"scripted", "hint", "http"});
  require_one_of("predictor_backend", predictor_backend, {"local", "remote"});
  require_one_of("similarity", similarity, {"dice", "embedding"});
  require_one_of("mode", mode, {"greedy", "sampled"});
  require_one_of("hint_mode", hint_mode, {"none", "top1", "topk", "fixed"});
  require_one_of("intent_history", intent_history, {"extractor", "predicted"});
  if (view_size == 0) throw ConfigError("view_size must be positive");
  if (hint_mode == "topk" && resolved_k() < 2) throw ConfigError("hint_mode=topk needs k >= 2");
  if (resolved_beam_width() < resolved_k()) throw ConfigError("beam_width must be at least k");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
  if (k_max == 0) throw ConfigError("k_max must be positive");
  if (!(holdout > 0.0 && holdout < 1.0)) throw ConfigError("holdout must lie in (0, 1)");
  if (samples_per_transition == 0) throw ConfigError("samples_per_transition must be positive");
  if (pool == 0) throw ConfigError("pool must be positive");
  if (!(smoothing > 0.0)) throw ConfigError("smoothing must be positive");
  if (neighbor_count == 0) throw ConfigError("neighbor_count must be positive");
  if (workers == 0) throw ConfigError("workers must be positive");
  if (requests_per_minute < 0) throw ConfigError("requests_per_minute must be >= 0");
  if (timeout_s <= 0) throw ConfigError("timeout_s must be positive");
  const bool remote = backend == "http" || predictor_backend == "remote" || similarity == "embedding";
  if (remote && !allow_remote)
    throw ConfigError("remote backends are disabled; set allow_remote to true to call network endpoints");
}

std::size_t RunConfig::resolved_k() const { return k ? k : (view_size <= 20 ? 5 : 7); }

std::size_t RunConfig::resolved_beam_width() const {
  return beam_width ? beam_width : (view_size <= 20 ? 12 : 8);
}

std::string RunConfig::fingerprint() const {
  nlohmann::json j = to_json();
  j.erase("output");
  j.erase("workers");  // parallel runs produce identical outputs
  return text::hex64(text::fnv1a64(j.dump()));
}

}  // namespace autointent
