#include "autointent/eval/metrics.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent::eval {

bool element_correct(const Action& predicted, const Step& gt) {
  return gt.gt_element_ids.contains(predicted.element_id);
}

std::vector<std::string> operation_tokens(const Action& action) {
  std::vector<std::string> tokens{text::to_lower(to_string(action.kind))};
  for (auto& t : text::split_whitespace(text::to_lower(action.value))) tokens.push_back(std::move(t));
  return tokens;
}

double operation_f1(const Action& predicted, const Action& gt) {
  const auto p = operation_tokens(predicted);
  const auto g = operation_tokens(gt);
  std::map<std::string, long> counts;
  for (const auto& t : g) ++counts[t];
  long overlap = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

bool step_success(const Action& predicted, const Step& gt) {
  return element_correct(predicted, gt) && predicted.kind == gt.action.kind &&
         text::to_lower(text::trim(predicted.value)) == text::to_lower(text::trim(gt.action.value));
}

bool step_success(const StepOutcome& outcome) {
  return outcome.predicted && step_success(*outcome.predicted, outcome.gt);
}

void score(StepOutcome& outcome) {
  if (!outcome.predicted) {
    outcome.element_correct = false;
    outcome.op_f1 = 0.0;
    outcome.step_success = false;
    return;
  }
  outcome.element_correct = element_correct(*outcome.predicted, outcome.gt);
  outcome.op_f1 = operation_f1(*outcome.predicted, outcome.gt.action);
  outcome.step_success = step_success(*outcome.predicted, outcome.gt);
}

namespace {
template <typename F>
double mean_of(std::span<const StepOutcome> outcomes, F f) {
  if (outcomes.empty()) throw DataError("metric over zero steps");
  double s = 0.0;
  for (const auto& o : outcomes) s += f(o);
  return s / static_cast<double>(outcomes.size());
}
}  // namespace

double element_accuracy(std::span<const StepOutcome> outcomes) {
  return mean_of(outcomes, [](const StepOutcome& o) { return o.element_correct ? 1.0 : 0.0; });
}

double mean_operation_f1(std::span<const StepOutcome> outcomes) {
  return mean_of(outcomes, [](const StepOutcome& o) { return o.op_f1; });
}

double step_success_rate(std::span<const StepOutcome> outcomes) {
  return mean_of(outcomes, [](const StepOutcome& o) { return o.step_success ? 1.0 : 0.0; });
}

StepOutcome oracle_select(std::span<const StepOutcome> per_rank) {
  if (per_rank.empty()) throw DataError("oracle_select needs at least one outcome");
  std::size_t best = 0;
  auto key = [](const StepOutcome& o) { return std::make_tuple(o.step_success, o.element_correct, o.op_f1); };
  for (std::size_t i = 1; i < per_rank.size(); ++i) {
    if (key(per_rank[i]) > key(per_rank[best])) best = i;
  }
  return per_rank[best];
}

}  // namespace autointent::eval
