#pragma once

#include <span>
#include <string>
#include <vector>

#include "autointent/outcome.hpp"
#include "autointent/types.hpp"

namespace autointent::eval {

/// Predicted element is one of the ground-truth elements.
bool element_correct(const Action& predicted, const Step& gt);

/// Kind token followed by the lowercased whitespace-split value tokens.
std::vector<std::string> operation_tokens(const Action& action);

/// Token-multiset F1 between operation_tokens of both actions.
double operation_f1(const Action& predicted, const Action& gt);

/// Element correct, same kind, and values equal after trimming and lowercasing.
bool step_success(const Action& predicted, const Step& gt);
bool step_success(const StepOutcome& outcome);

/// Fills element_correct, op_f1 and step_success from `predicted` and `gt`.
void score(StepOutcome& outcome);

double element_accuracy(std::span<const StepOutcome> outcomes);
double mean_operation_f1(std::span<const StepOutcome> outcomes);
double step_success_rate(std::span<const StepOutcome> outcomes);

/// Per step, the best outcome over ranks: step success, then element
/// correctness, then op F1; ties go to the lower rank. Input is indexed by
/// rank (0 = top-1) and must be non-empty.
StepOutcome oracle_select(std::span<const StepOutcome> per_rank);

}  // namespace autointent::eval
