#include "autointent/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent {

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Click: return "CLICK";
    case ActionKind::Select: return "SELECT";
    case ActionKind::Type: return "TYPE";
  }
  return "CLICK";
}

std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::CrossTask: return "cross_task";
    case SplitTag::CrossWebsite: return "cross_website";
    case SplitTag::CrossDomain: return "cross_domain";
    case SplitTag::Other: return "other";
  }
  return "other";
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
  std::string u = text::to_lower(s);
  if (u == "click") return ActionKind::Click;
  if (u == "select") return ActionKind::Select;
  if (u == "type") return ActionKind::Type;
  return std::nullopt;
}

std::optional<SplitTag> parse_split_tag(std::string_view s) {
  for (auto tag : {SplitTag::Train, SplitTag::CrossTask, SplitTag::CrossWebsite, SplitTag::CrossDomain,
                   SplitTag::Other}) {
    if (to_string(tag) == s) return tag;
  }
  return std::nullopt;
}

bool candidate_before(const Element& a, const Element& b) {
  if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
  return a.element_id < b.element_id;
}

void sort_candidates(std::vector<Element>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(), candidate_before);
}

const Element* Observation::find(std::string_view element_id) const {
  for (const auto& e : candidates) {
    if (e.element_id == element_id) return &e;
  }
  return nullptr;
}

Trajectory AnnotatedTrajectory::plain() const {
  Trajectory t{task_id, {}, split_tag};
  t.steps.reserve(steps.size());
  for (const auto& s : steps) t.steps.push_back(s.step);
  return t;
}

void validate(const Element& e) {
  if (e.element_id.empty()) throw ValidationError("element: empty element_id");
  if (!std::isfinite(e.rank_score)) throw ValidationError("element " + e.element_id + ": rank_score not finite");
}

void validate(const Observation& o) {
  if (o.candidates.empty()) throw ValidationError("observation: no candidates");
  if (o.step_index < 1) throw ValidationError("observation: step_index must be >= 1");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < o.candidates.size(); ++i) {
    const auto& e = o.candidates[i];
    validate(e);
    if (!seen.insert(e.element_id).second) throw ValidationError("observation: duplicate element_id " + e.element_id);
    if (i > 0 && candidate_before(e, o.candidates[i - 1]))
      throw ValidationError("observation: candidates not sorted at " + e.element_id);
  }
}

void validate(const Action& a) {
  if (a.element_id.empty()) throw ValidationError("action: empty element_id");
  if (a.kind == ActionKind::Click && !a.value.empty()) throw ValidationError("action: CLICK carries a value");
  if (a.kind != ActionKind::Click && a.value.empty())
    throw ValidationError("action: " + std::string(to_string(a.kind)) + " requires a value");
}

void validate(const Step& s) {
  validate(s.observation);
  validate(s.action);
  if (s.gt_element_ids.empty()) throw ValidationError("step: gt_element_ids empty");
  if (!s.gt_element_ids.contains(s.action.element_id))
    throw ValidationError("step: action element " + s.action.element_id + " not in gt_element_ids");
}

namespace {
template <typename GetStep>
void validate_steps(const std::string& task_id, std::size_t n, GetStep get) {
  if (n == 0) throw ValidationError("trajectory " + task_id + ": no steps");
  for (std::size_t i = 0; i < n; ++i) {
    const Step& s = get(i);
    validate(s);
    if (s.observation.step_index != static_cast<int>(i + 1))
      throw ValidationError("trajectory " + task_id + ": step_index " + std::to_string(s.observation.step_index) +
                            " at position " + std::to_string(i + 1));
  }
}
}  // namespace

void validate(const Trajectory& t) {
  validate_steps(t.task_id, t.steps.size(), [&](std::size_t i) -> const Step& { return t.steps[i]; });
}

void validate(const AnnotatedTrajectory& t) {
  validate_steps(t.task_id, t.steps.size(), [&](std::size_t i) -> const Step& { return t.steps[i].step; });
}

std::string render_action(const Action& action, std::string_view tag) {
  std::string out(to_string(action.kind));
  out += " <";
  out += tag.empty() ? "element" : tag;
  out += " id=" + action.element_id + " />";
  if (action.kind != ActionKind::Click && !action.value.empty()) out += " " + action.value;
  return out;
}

std::string render_action_brief(const Action& action) {
  std::string out(to_string(action.kind));
  out += " id=" + action.element_id;
  if (action.kind != ActionKind::Click) out += " \"" + action.value + "\"";
  return out;
}

}  // namespace autointent
