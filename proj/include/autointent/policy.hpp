#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autointent/llm/chat.hpp"
#include "autointent/outcome.hpp"
#include "autointent/predictor/local_predictor.hpp"
#include "autointent/prompt_assets.hpp"

namespace autointent::policy {

enum class HintMode { None, Top1, TopK, FixedIntent };
std::string_view to_string(HintMode mode);
std::optional<HintMode> parse_hint_mode(std::string_view s);

/// Where the intent history of step t comes from during offline runs.
enum class IntentHistory { Extractor, PredictedTop1 };

struct PolicyConfig {
  std::size_t k_intents = 5;
  std::size_t view_size = 20;
  HintMode hint_mode = HintMode::TopK;
  double temperature = 0.0;
  int max_tokens = 64;
  std::size_t max_element_text = 100;
  std::size_t max_prompt_chars = 32000;
  IntentHistory intent_history = IntentHistory::Extractor;
  std::string system_preamble;
  std::string query_template;
  std::vector<InContextExample> in_context_examples;

  /// k = 5 for up to 20 candidates, 7 beyond; texts from `assets`.
  static PolicyConfig defaults(std::size_t view_size, const PromptAssets& assets = PromptAssets::builtin());
};

/// Throws ConfigError; hint_mode=topk requires k_intents >= 2.
void validate(const PolicyConfig& cfg);

/// Renders the top view_size candidates, the history and, unless
/// hint_mode is none, the numbered intent list: one intent for top1 and
/// fixed_intent, at most k_intents for topk.
llm::ChatRequest build_policy_prompt(const Observation& observation, std::span<const Action> action_history,
                                     std::span<const ScoredIntent> intents, const PolicyConfig& cfg);

/// Accepts `KIND <tag id=ID /> value`, `KIND id=ID value` or `KIND [n] value`
/// (n indexes the view from 1), case-insensitively, on the first line that
/// names an action kind. Throws UnparseableAction or UnknownElement.
Action parse_action_response(std::string_view text, std::span<const Element> view);

struct ActResult {
  std::optional<Action> action;
  std::vector<ScoredIntent> intents;
  std::string error;
};

/// One policy decision. The predictor is consulted only for top1/topk;
/// fixed_intent shows `fixed` as the single hint. Failures of any stage
/// are reported in ActResult::error; only AuthError propagates, since no
/// later step could succeed with the same credentials.
ActResult act(const PredictionContext& ctx, const IntentPredictor* predictor, llm::ChatBackend& backend,
              const PolicyConfig& cfg, const std::optional<Intent>& fixed = std::nullopt);

using ActFn = std::function<ActResult(const PredictionContext& ctx, const AnnotatedStep& step)>;

/// Scores one decision against the ground-truth step.
StepOutcome score_step(const Step& gt, ActResult result);

/// Teacher-forced pass over t = 1..T: the context at step t carries the
/// ground-truth actions and (by default) the annotated intents of steps
/// before t, independent of earlier predictions.
std::vector<StepOutcome> run_offline_task(const AnnotatedTrajectory& trajectory, const ActFn& act_fn,
                                          const PolicyConfig& cfg);

/// act() bound to fixed collaborators; FixedIntent hints use each step's annotation.
ActFn make_act_fn(const IntentPredictor* predictor, llm::ChatBackend& backend, const PolicyConfig& cfg);

}  // namespace autointent::policy
