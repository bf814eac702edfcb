#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "autointent/intent.hpp"
#include "autointent/types.hpp"

namespace autointent {

// Conditioning input for intent prediction at step `step_index`: the
// current candidate view plus ground-truth actions and intents of the
// earlier steps.
struct PredictionContext {
  std::string task;
  std::vector<Element> candidate_view;
  std::vector<Action> action_history;
  std::vector<Intent> intent_history;
  int step_index = 1;

  friend bool operator==(const PredictionContext&, const PredictionContext&) = default;
};

/// Histories must both have length step_index - 1.
void validate(const PredictionContext& ctx);

struct ScoredIntent {
  Intent intent;
  double log_score = 0.0;

  friend bool operator==(const ScoredIntent&, const ScoredIntent&) = default;
};

/// Score descending, then intent text ascending.
bool scored_before(const ScoredIntent& a, const ScoredIntent& b);

/// Sorts with scored_before and keeps the first occurrence of each intent text.
void sort_and_dedup(std::vector<ScoredIntent>& items);

/// Context for step `position` (0-based) of an annotated trajectory, with
/// the top `view_size` candidates and teacher-forced histories.
PredictionContext context_for_step(const AnnotatedTrajectory& trajectory, std::size_t position, std::size_t view_size);

// Text rendering of a context, shared by fine-tuning exports and the
// remote predictor:
//
//   task: <task>
//   step: <t>
//   previous actions:
//   1. CLICK id=3
//   previous intents:
//   1. selecting date
//   candidates:
//   (1) <button id=5> Find a table
//
// Empty histories render as "(none)". Candidate text is capped at
// `max_text` bytes and attributes are omitted.
std::string featurize_text(const PredictionContext& ctx, std::size_t max_text = 100);

}  // namespace autointent
