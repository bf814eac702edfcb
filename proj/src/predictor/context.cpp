#include "autointent/predictor/context.hpp"

#include <algorithm>
#include <unordered_set>

#include "autointent/errors.hpp"
#include "autointent/render.hpp"

namespace autointent {

void validate(const PredictionContext& ctx) {
  if (ctx.step_index < 1) throw ValidationError("context: step_index must be >= 1");
  const auto expected = static_cast<std::size_t>(ctx.step_index - 1);
  if (ctx.action_history.size() != expected || ctx.intent_history.size() != expected)
    throw ValidationError("context: history lengths must equal step_index - 1");
}

bool scored_before(const ScoredIntent& a, const ScoredIntent& b) {
  if (a.log_score != b.log_score) return a.log_score > b.log_score;
  return a.intent.text() < b.intent.text();
}

void sort_and_dedup(std::vector<ScoredIntent>& items) {
  std::stable_sort(items.begin(), items.end(), scored_before);
  std::unordered_set<std::string> seen;
  std::erase_if(items, [&](const ScoredIntent& s) { return !seen.insert(s.intent.text()).second; });
}

PredictionContext context_for_step(const AnnotatedTrajectory& trajectory, std::size_t position, std::size_t view_size) {
  if (position >= trajectory.steps.size()) throw ValidationError("context_for_step: position out of range");
  const Step& step = trajectory.steps[position].step;
  PredictionContext ctx;
  ctx.task = step.observation.task;
  ctx.step_index = static_cast<int>(position + 1);
  const std::size_t n = std::min(view_size, step.observation.candidates.size());
  ctx.candidate_view.assign(step.observation.candidates.begin(), step.observation.candidates.begin() + n);
  for (std::size_t i = 0; i < position; ++i) {
    ctx.action_history.push_back(trajectory.steps[i].step.action);
    ctx.intent_history.push_back(trajectory.steps[i].intent);
  }
  return ctx;
}

std::string featurize_text(const PredictionContext& ctx, std::size_t max_text) {
  std::vector<std::string> actions, intents;
  for (const auto& a : ctx.action_history) actions.push_back(render_action_brief(a));
  for (const auto& z : ctx.intent_history) intents.push_back(z.text());
  std::string out;
  out += "task: " + ctx.task + "\n";
  out += "step: " + std::to_string(ctx.step_index) + "\n";
  out += "previous actions:\n" + render_numbered(actions) + "\n";
  out += "previous intents:\n" + render_numbered(intents) + "\n";
  out += "candidates:\n";
  out += ctx.candidate_view.empty() ? std::string("(none)")
                                    : render_candidates(ctx.candidate_view, ctx.candidate_view.size(), max_text, false);
  return out;
}

}  // namespace autointent
