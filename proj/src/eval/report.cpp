#include "autointent/eval/report.hpp"

#include <algorithm>
#include <cstdio>

#include "autointent/errors.hpp"
#include "autointent/eval/metrics.hpp"
#include "autointent/trajectory_io.hpp"

namespace autointent::eval {

namespace {

nlohmann::json metrics_json(const Metrics& m) {
  return {{"elem_acc", m.elem_acc}, {"op_f1", m.op_f1}, {"step_sr", m.step_sr}};
}

Metrics metrics_from_json(const nlohmann::json& j) {
  return {j.at("elem_acc").get<double>(), j.at("op_f1").get<double>(), j.at("step_sr").get<double>()};
}

std::string percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [id, t] : per_task) {
    auto j = metrics_json(t.metrics);
    j["n_steps"] = t.n_steps;
    tasks[id] = j;
  }
  return {{"schema", kReportSchema},   {"config_fingerprint", config_fingerprint},
          {"n_tasks", n_tasks},        {"n_steps", n_steps},
          {"macro", metrics_json(macro)}, {"per_task", tasks}};
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema) throw DataError("not a metrics report");
    MetricsReport r;
    r.config_fingerprint = j.value("config_fingerprint", "");
    r.n_tasks = j.at("n_tasks").get<std::size_t>();
    r.n_steps = j.at("n_steps").get<std::size_t>();
    r.macro = metrics_from_json(j.at("macro"));
    for (const auto& [id, t] : j.at("per_task").items())
      r.per_task[id] = TaskMetrics{metrics_from_json(t), t.at("n_steps").get<std::size_t>()};
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed metrics report: ") + e.what());
  }
}

Metrics task_metrics(const std::vector<StepOutcome>& outcomes) {
  return {element_accuracy(outcomes), mean_operation_f1(outcomes), step_success_rate(outcomes)};
}

MetricsReport macro_report(const OutcomesByTask& outcomes, std::string config_fingerprint) {
  if (outcomes.empty()) throw EmptyDataset("metrics report over zero tasks");
  MetricsReport r;
  r.config_fingerprint = std::move(config_fingerprint);
  for (const auto& [id, steps] : outcomes) {
    if (steps.empty()) throw DataError("task " + id + " has no evaluated steps");
    const Metrics m = task_metrics(steps);
    r.per_task[id] = TaskMetrics{m, steps.size()};
    r.macro.elem_acc += m.elem_acc;
    r.macro.op_f1 += m.op_f1;
    r.macro.step_sr += m.step_sr;
    r.n_steps += steps.size();
  }
  r.n_tasks = outcomes.size();
  const auto n = static_cast<double>(r.n_tasks);
  r.macro.elem_acc /= n;
  r.macro.op_f1 /= n;
  r.macro.step_sr /= n;
  return r;
}

Metrics micro_metrics(const OutcomesByTask& outcomes) {
  std::vector<StepOutcome> all;
  for (const auto& [id, steps] : outcomes) all.insert(all.end(), steps.begin(), steps.end());
  return task_metrics(all);
}

nlohmann::json outcome_to_json(const StepOutcome& o) {
  nlohmann::json intents = nlohmann::json::array();
  for (const auto& s : o.intents_shown) intents.push_back({{"intent", s.intent.text()}, {"log_score", s.log_score}});
  return {{"step_index", o.gt.observation.step_index},
          {"predicted", o.predicted ? io::to_json(*o.predicted) : nlohmann::json(nullptr)},
          {"gt_action", io::to_json(o.gt.action)},
          {"gt_element_ids", o.gt.gt_element_ids},
          {"element_correct", o.element_correct},
          {"op_f1", o.op_f1},
          {"step_success", o.step_success},
          {"intents_shown", intents},
          {"error", o.error}};
}

std::string render_table(const std::vector<TableRow>& rows, const std::vector<std::string>& splits) {
  static const char* kColumns[] = {"Elem. acc", "Op. F1", "Step SR"};
  constexpr std::size_t kCell = 9;
  constexpr std::size_t kGroup = 3 * kCell + 2;

  std::size_t method_w = 6;
  for (const auto& r : rows) method_w = std::max(method_w, r.method.size());

  std::string head1 = pad_right("Method", method_w);
  std::string head2 = std::string(method_w, ' ');
  for (const auto& split : splits) {
    const std::size_t left = split.size() < kGroup ? (kGroup - split.size()) / 2 : 0;
    head1 += " | " + pad_right(std::string(left, ' ') + split, kGroup);
    head2 += " | ";
    for (int c = 0; c < 3; ++c) head2 += (c ? " " : "") + pad_left(kColumns[c], kCell);
  }
  std::string out = head1 + "\n" + head2 + "\n" + std::string(head2.size(), '-') + "\n";
  for (const auto& r : rows) {
    std::string line = pad_right(r.method, method_w);
    for (const auto& split : splits) {
      line += " | ";
      auto it = r.by_split.find(split);
      if (it == r.by_split.end()) {
        line += pad_left("-", kCell) + " " + pad_left("-", kCell) + " " + pad_left("-", kCell);
        continue;
      }
      const Metrics& m = it->second.macro;
      line += pad_left(percent(m.elem_acc), kCell) + " " + pad_left(percent(m.op_f1), kCell) + " " +
              pad_left(percent(m.step_sr), kCell);
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace autointent::eval
