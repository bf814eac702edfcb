#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autointent/predictor/context.hpp"
#include "autointent/types.hpp"

namespace autointent {

// Result of acting at one ground-truth step. `predicted` is empty when the
// model reply could not be turned into a valid action; `error` then says why.
struct StepOutcome {
  std::optional<Action> predicted;
  Step gt;
  bool element_correct = false;
  double op_f1 = 0.0;
  bool step_success = false;
  std::vector<ScoredIntent> intents_shown;
  std::string error;
};

}  // namespace autointent
