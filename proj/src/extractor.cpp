#include "autointent/extractor.hpp"

#include "autointent/errors.hpp"
#include "autointent/parallel.hpp"
#include "autointent/prompt_format.hpp"
#include "autointent/render.hpp"
#include "autointent/rng.hpp"
#include "autointent/text.hpp"

namespace autointent::extractor {

ExtractionPromptConfig ExtractionPromptConfig::from_assets(const PromptAssets& assets) {
  ExtractionPromptConfig cfg;
  cfg.system_preamble = assets.extractor_system;
  cfg.query_template = assets.extractor_query;
  cfg.in_context_examples = assets.extractor_examples;
  return cfg;
}

std::string_view to_string(Mode mode) { return mode == Mode::Greedy ? "greedy" : "sampled"; }

namespace {

std::string action_for_prompt(const Observation& observation, const Action& action) {
  const Element* target = observation.find(action.element_id);
  if (!target) return render_action(action, "element") + " (element not in candidates)";
  return render_action(action, target->tag);
}

llm::ChatRequest assemble(const Observation& observation, const Action& action, std::span<const Intent> previous,
                          const ExtractionPromptConfig& cfg, std::size_t text_cap, bool with_attributes) {
  std::vector<std::string> prior;
  prior.reserve(previous.size());
  for (const auto& z : previous) prior.push_back(z.text());

  const std::string query = text::render_template(
      cfg.query_template, {{"task", observation.task},
                           {"previous_intents", render_numbered(prior)},
                           {"candidates", render_candidates(observation.candidates, cfg.max_candidates_rendered,
                                                            text_cap, with_attributes)},
                           {"action", action_for_prompt(observation, action)}});

  llm::ChatRequest req;
  req.messages.push_back({llm::Role::System, cfg.system_preamble});
  for (const auto& ex : cfg.in_context_examples) {
    req.messages.push_back({llm::Role::User, ex.input});
    req.messages.push_back({llm::Role::Assistant, ex.output});
  }
  req.messages.push_back({llm::Role::User, query});
  req.temperature = 0.0;
  req.max_tokens = cfg.max_tokens;
  req.n_samples = 1;
  return req;
}

}  // namespace

llm::ChatRequest build_extraction_prompt(const Observation& observation, const Action& action,
                                         std::span<const Intent> previous_intents, const ExtractionPromptConfig& cfg) {
  if (cfg.in_context_examples.empty()) throw ConfigError("extraction prompt needs at least one in-context example");
  // Shrink candidate text until the prompt fits; attributes go last.
  for (std::size_t cap = cfg.max_element_text;; cap /= 2) {
    auto req = assemble(observation, action, previous_intents, cfg, cap, true);
    if (llm::render_prompt(req).size() <= cfg.max_prompt_chars) return req;
    if (cap == 0) break;
  }
  auto req = assemble(observation, action, previous_intents, cfg, 0, false);
  if (llm::render_prompt(req).size() <= cfg.max_prompt_chars) return req;
  throw PromptTooLong("extraction prompt for step " + std::to_string(observation.step_index) + " exceeds " +
                      std::to_string(cfg.max_prompt_chars) + " characters");
}

NormalizedIntent parse_intent_response(std::string_view completion) {
  std::string line;
  for (const auto& l : text::split_lines(completion)) {
    if (!text::trim(l).empty()) {
      line = std::string(text::trim(l));
      break;
    }
  }
  std::string_view s = line;
  // List markers: "1.", "2)", "-", "*", bullets.
  {
    std::size_t i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) s.remove_prefix(i + 1);
    s = text::trim(s);
    if (s.starts_with("- ") || s.starts_with("* ")) s.remove_prefix(2);
    if (s.starts_with("\xE2\x80\xA2")) s.remove_prefix(3);
    s = text::trim(s);
  }
  if (text::starts_with_icase(s, "intent:")) s = text::trim(s.substr(7));
  return normalize_intent(s);
}

ExtractionStats& ExtractionStats::operator+=(const ExtractionStats& other) {
  steps += other.steps;
  truncations += other.truncations;
  reprompts += other.reprompts;
  backend_retries += other.backend_retries;
  gerund_warnings += other.gerund_warnings;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  return *this;
}

nlohmann::json ExtractionStats::to_json() const {
  return nlohmann::json{{"steps", steps},
                        {"truncations", truncations},
                        {"reprompts", reprompts},
                        {"backend_retries", backend_retries},
                        {"gerund_warnings", gerund_warnings},
                        {"warnings", warnings}};
}

namespace {

struct Draw {
  std::optional<NormalizedIntent> intent;  // nullopt when the reply normalized to nothing
  bool acceptable() const { return intent && !intent->truncated; }
};

Draw draw_intent(llm::ChatBackend& backend, llm::ChatRequest req, Mode mode, Rng& rng) {
  if (mode == Mode::Sampled) {
    req.n_samples = kSampledCount;
    req.temperature = kSampledTemperature;
  }
  llm::ChatResponse resp = backend.complete(req);
  if (resp.completions.empty()) throw BackendError("backend returned no completions");
  const std::size_t pick = mode == Mode::Sampled ? rng.uniform_index(resp.completions.size()) : 0;
  try {
    return Draw{parse_intent_response(resp.completions[pick])};
  } catch (const EmptyIntent&) {
    return Draw{std::nullopt};
  }
}

}  // namespace

ExtractionResult extract_trajectory(const Trajectory& trajectory, llm::ChatBackend& backend,
                                    const ExtractionPromptConfig& cfg, Mode mode, std::uint64_t seed) {
  validate(trajectory);
  ExtractionResult result;
  result.trajectory.task_id = trajectory.task_id;
  result.trajectory.split_tag = trajectory.split_tag;
  Rng rng(seed);
  std::vector<Intent> previous;
  const std::size_t retries_before = backend.retry_count();

  for (const Step& step : trajectory.steps) {
    const int t = step.observation.step_index;
    try {
      llm::ChatRequest req = build_extraction_prompt(step.observation, step.action, previous, cfg);
      Draw d = draw_intent(backend, req, mode, rng);
      if (!d.acceptable()) {
        ++result.stats.reprompts;
        llm::ChatRequest again = req;
        again.messages.back().content += "\n\n" + std::string(kLengthReminder);
        d = draw_intent(backend, again, mode, rng);
      }
      if (!d.intent) throw EmptyIntent("reply has no intent words after re-prompt");
      if (d.intent->truncated) ++result.stats.truncations;
      if (!looks_gerund_led(d.intent->intent)) {
        ++result.stats.gerund_warnings;
        result.stats.warnings.push_back(trajectory.task_id + " step " + std::to_string(t) + ": '" +
                                        d.intent->intent.text() + "' does not start with a gerund");
      }
      ++result.stats.steps;
      previous.push_back(d.intent->intent);
      result.trajectory.steps.push_back(AnnotatedStep{step, d.intent->intent});
    } catch (const BackendError& e) {
      throw BackendError(trajectory.task_id + " step " + std::to_string(t) + ": " + e.what(), e.http_status());
    } catch (const EmptyIntent& e) {
      throw EmptyIntent(trajectory.task_id + " step " + std::to_string(t) + ": " + e.what());
    }
  }
  result.stats.backend_retries = backend.retry_count() - retries_before;
  return result;
}

std::vector<ExtractionResult> extract_all(const std::vector<Trajectory>& trajectories, llm::ChatBackend& backend,
                                          const ExtractionPromptConfig& cfg, Mode mode, std::uint64_t seed,
                                          unsigned workers) {
  std::vector<ExtractionResult> results(trajectories.size());
  parallel_for(trajectories.size(), workers, [&](std::size_t i) {
    results[i] = extract_trajectory(trajectories[i], backend, cfg, mode, derive_seed(seed, trajectories[i].task_id));
  });
  return results;
}

}  // namespace autointent::extractor
