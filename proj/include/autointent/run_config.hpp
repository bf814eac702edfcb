#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace autointent {

// Resolved settings for one CLI invocation. Loaded from a JSON file whose
// keys mirror the field names; command-line flags are applied on top.
struct RunConfig {
  // paths
  std::string input;
  std::string output;
  std::string prompts;    // directory overriding the built-in prompt texts
  std::string script;     // scripted backend replies (JSON Lines)
  std::string hint_map;   // hint-following backend mappings (JSON Lines)
  std::string train;      // augmented samples used to build the local predictor
  std::string predictor;  // saved local predictor snapshot

  // chat backend: "scripted", "hint" or "http"
  std::string backend = "scripted";
  std::string endpoint;
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  int requests_per_minute = 0;
  int timeout_s = 60;
  bool allow_remote = false;

  // intent predictor: "local" or "remote"
  std::string predictor_backend = "local";
  std::string predictor_endpoint;
  double smoothing = 0.1;
  std::size_t neighbor_count = 32;

  // recall similarity: "dice" or "embedding"
  std::string similarity = "dice";
  std::string embedding_endpoint;
  std::string embedding_model;
  double threshold = 0.7;
  std::size_t k_max = 10;

  // pipeline
  std::size_t view_size = 20;
  std::size_t k = 0;           // 0: 5 for view_size <= 20, else 7
  std::size_t beam_width = 0;  // 0: 12 for view_size <= 20, else 8
  std::uint64_t seed = 0;
  std::string mode = "greedy";
  std::string hint_mode = "topk";
  std::string intent_history = "extractor";
  std::string conditions = "none,fixed,top1,topk,oracle";
  std::size_t samples_per_transition = 32;
  std::size_t pool = 80;
  double holdout = 0.05;
  unsigned workers = 1;

  /// Missing keys keep their defaults; unknown keys raise ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Throws ConfigError on out-of-range or inconsistent settings.
  void validate() const;

  std::size_t resolved_k() const;
  std::size_t resolved_beam_width() const;

  /// Hash of the canonical JSON of every setting except output locations.
  std::string fingerprint() const;
};

}  // namespace autointent
