#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autointent/eval/report.hpp"
#include "autointent/policy.hpp"

namespace autointent::eval {

enum class Condition { NoIntent, OneDiscoveredIntent, Top1, TopK, OracleSelect };

inline constexpr Condition kAllConditions[] = {Condition::NoIntent, Condition::OneDiscoveredIntent, Condition::Top1,
                                               Condition::TopK, Condition::OracleSelect};

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

/// Outcomes of every step, grouped by split then task. The pseudo split
/// "all" pools every trajectory.
using OutcomesBySplit = std::map<std::string, OutcomesByTask>;

inline constexpr std::string_view kAllSplits = "all";

/// Teacher-forced offline run of `act_fn` over all trajectories on up to
/// `workers` threads; the merge is by task id and independent of scheduling.
OutcomesBySplit run_offline(std::span<const AnnotatedTrajectory> trajectories, const policy::ActFn& act_fn,
                            const policy::PolicyConfig& cfg, unsigned workers = 1);

/// Acts once per top-k intent, each shown alone, and keeps the best outcome
/// per step (oracle_select).
OutcomesBySplit run_oracle_select(std::span<const AnnotatedTrajectory> trajectories, const IntentPredictor& predictor,
                                  llm::ChatBackend& backend, const policy::PolicyConfig& cfg, unsigned workers = 1);

std::map<std::string, MetricsReport> reports_by_split(const OutcomesBySplit& outcomes,
                                                      const std::string& config_fingerprint);

struct AblationConfig {
  policy::PolicyConfig policy;  // k_intents also sets the oracle-select width
  std::vector<Condition> conditions{std::begin(kAllConditions), std::end(kAllConditions)};
  unsigned workers = 1;
  std::string config_fingerprint;
};

struct AblationResult {
  std::map<Condition, OutcomesBySplit> outcomes;
  std::map<Condition, std::map<std::string, MetricsReport>> reports;

  /// Splits present in the reports, in SplitTag order, then "all".
  std::vector<std::string> splits() const;
  std::vector<TableRow> table_rows() const;
  nlohmann::json to_json() const;
};

// Conditions: no intents; the annotated intent of each step as the single
// hint; predicted top-1; predicted top-k together; oracle select over top-k.
AblationResult run_ablation(std::span<const AnnotatedTrajectory> trajectories, const IntentPredictor& predictor,
                            llm::ChatBackend& backend, const AblationConfig& cfg);

}  // namespace autointent::eval
