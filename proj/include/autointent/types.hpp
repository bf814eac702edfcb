#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autointent/intent.hpp"

namespace autointent {

enum class ActionKind { Click, Select, Type };
enum class SplitTag { Train, CrossTask, CrossWebsite, CrossDomain, Other };

std::string_view to_string(ActionKind kind);
std::string_view to_string(SplitTag tag);
/// Case-insensitive; returns nullopt for unknown names.
std::optional<ActionKind> parse_action_kind(std::string_view s);
std::optional<SplitTag> parse_split_tag(std::string_view s);

// A candidate interactive element that survived the external ranking stage.
struct Element {
  std::string element_id;
  std::string tag;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attributes;
  double rank_score = 0.0;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Ordering for candidate lists: rank_score descending, then element_id ascending.
bool candidate_before(const Element& a, const Element& b);
void sort_candidates(std::vector<Element>& candidates);

struct Observation {
  std::string task;
  int step_index = 1;
  std::vector<Element> candidates;
  std::optional<std::string> page_meta;

  const Element* find(std::string_view element_id) const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Action {
  ActionKind kind = ActionKind::Click;
  std::string element_id;
  std::string value;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Step {
  Observation observation;
  Action action;
  std::set<std::string> gt_element_ids;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
  std::string task_id;
  std::vector<Step> steps;
  SplitTag split_tag = SplitTag::Train;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct AnnotatedStep {
  Step step;
  Intent intent;

  friend bool operator==(const AnnotatedStep&, const AnnotatedStep&) = default;
};

struct AnnotatedTrajectory {
  std::string task_id;
  std::vector<AnnotatedStep> steps;
  SplitTag split_tag = SplitTag::Train;

  Trajectory plain() const;

  friend bool operator==(const AnnotatedTrajectory&, const AnnotatedTrajectory&) = default;
};

// Invariant checks; each throws ValidationError naming the violated rule.
void validate(const Element& e);
void validate(const Observation& o);
void validate(const Action& a);
void validate(const Step& s);
void validate(const Trajectory& t);
void validate(const AnnotatedTrajectory& t);

/// `KIND <tag id=ID /> value` with the value omitted for CLICK.
std::string render_action(const Action& action, std::string_view tag);
/// History form without a tag: `KIND id=ID "value"`.
std::string render_action_brief(const Action& action);

}  // namespace autointent
