#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "autointent/outcome.hpp"

namespace autointent::eval {

struct Metrics {
  double elem_acc = 0.0;
  double op_f1 = 0.0;
  double step_sr = 0.0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct TaskMetrics {
  Metrics metrics;
  std::size_t n_steps = 0;

  friend bool operator==(const TaskMetrics&, const TaskMetrics&) = default;
};

using OutcomesByTask = std::map<std::string, std::vector<StepOutcome>>;

struct MetricsReport {
  std::map<std::string, TaskMetrics> per_task;
  Metrics macro;
  std::size_t n_tasks = 0;
  std::size_t n_steps = 0;
  std::string config_fingerprint;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline constexpr std::string_view kReportSchema = "auto-intent/report-v1";

Metrics task_metrics(const std::vector<StepOutcome>& outcomes);

/// Per-task means, then the unweighted mean over tasks. Throws EmptyDataset
/// without tasks and DataError for a task with no steps.
MetricsReport macro_report(const OutcomesByTask& outcomes, std::string config_fingerprint = "");

/// Step-weighted means over all steps, for comparison with the macro figures.
Metrics micro_metrics(const OutcomesByTask& outcomes);

/// One outcome record: predicted and ground-truth actions, shown intents,
/// correctness flags and the failure reason, if any.
nlohmann::json outcome_to_json(const StepOutcome& outcome);

struct TableRow {
  std::string method;
  std::map<std::string, MetricsReport> by_split;
};

/// Aligned text table: one row per method, three percentage columns
/// (Elem. acc, Op. F1, Step SR) per split. Missing cells print "-".
std::string render_table(const std::vector<TableRow>& rows, const std::vector<std::string>& splits);

}  // namespace autointent::eval
