#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "autointent/intent.hpp"
#include "autointent/llm/chat.hpp"
#include "autointent/prompt_assets.hpp"
#include "autointent/types.hpp"

namespace autointent::extractor {

struct ExtractionPromptConfig {
  std::string system_preamble;
  std::string query_template;
  std::vector<InContextExample> in_context_examples;
  std::size_t max_candidates_rendered = 20;
  std::size_t max_element_text = 100;
  /// Character budget standing in for the backend context limit.
  std::size_t max_prompt_chars = 32000;
  int max_tokens = 16;

  static ExtractionPromptConfig from_assets(const PromptAssets& assets);
};

enum class Mode { Greedy, Sampled };
std::string_view to_string(Mode mode);

inline constexpr int kSampledCount = 5;
inline constexpr double kSampledTemperature = 0.2;
inline constexpr std::string_view kLengthReminder =
    "Reminder: the intent must be a single phrase of at most three words.";

/// Throws PromptTooLong when even stripped candidate text does not fit.
llm::ChatRequest build_extraction_prompt(const Observation& observation, const Action& action,
                                         std::span<const Intent> previous_intents, const ExtractionPromptConfig& cfg);

/// Takes the first non-empty line, drops list markers, an "Intent:" label
/// and quotes, then normalizes.
NormalizedIntent parse_intent_response(std::string_view text);

struct ExtractionStats {
  std::size_t steps = 0;
  std::size_t truncations = 0;
  std::size_t reprompts = 0;
  std::size_t backend_retries = 0;
  std::size_t gerund_warnings = 0;
  std::vector<std::string> warnings;

  ExtractionStats& operator+=(const ExtractionStats& other);
  nlohmann::json to_json() const;
};

struct ExtractionResult {
  AnnotatedTrajectory trajectory;
  ExtractionStats stats;
};

// Annotates steps strictly in order; step t is conditioned on the intents
// produced for steps 1..t-1. Sampled mode draws kSampledCount completions
// at kSampledTemperature and picks one uniformly. A reply over the word
// limit (or empty) triggers one re-prompt with kLengthReminder appended;
// a second over-long reply is truncated.
ExtractionResult extract_trajectory(const Trajectory& trajectory, llm::ChatBackend& backend,
                                    const ExtractionPromptConfig& cfg, Mode mode, std::uint64_t seed);

/// Runs extract_trajectory on each input with up to `workers` threads.
/// Per-trajectory seeds derive from (seed, task_id); output keeps input order.
std::vector<ExtractionResult> extract_all(const std::vector<Trajectory>& trajectories, llm::ChatBackend& backend,
                                          const ExtractionPromptConfig& cfg, Mode mode, std::uint64_t seed,
                                          unsigned workers = 1);

}  // namespace autointent::extractor
