#include "autointent/eval/ablation.hpp"

#include "autointent/errors.hpp"
#include "autointent/eval/metrics.hpp"
#include "autointent/parallel.hpp"

namespace autointent::eval {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::NoIntent: return "none";
    case Condition::OneDiscoveredIntent: return "fixed";
    case Condition::Top1: return "top1";
    case Condition::TopK: return "topk";
    case Condition::OracleSelect: return "oracle";
  }
  return "none";
}

std::optional<Condition> parse_condition(std::string_view s) {
  for (Condition c : kAllConditions)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace {

using PerTrajectory = std::function<std::vector<StepOutcome>(const AnnotatedTrajectory&)>;

OutcomesBySplit collect(std::span<const AnnotatedTrajectory> trajectories, unsigned workers, const PerTrajectory& run) {
  std::vector<std::vector<StepOutcome>> parts(trajectories.size());
  parallel_for(trajectories.size(), workers, [&](std::size_t i) { parts[i] = run(trajectories[i]); });
  OutcomesBySplit out;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    if (parts[i].empty()) continue;
    const std::string split(to_string(t.split_tag));
    for (const std::string& key : {split, std::string(kAllSplits)}) {
      auto [it, fresh] = out[key].emplace(t.task_id, parts[i]);
      if (!fresh) throw DataError("duplicate task id " + t.task_id);
    }
  }
  return out;
}

}  // namespace

OutcomesBySplit run_offline(std::span<const AnnotatedTrajectory> trajectories, const policy::ActFn& act_fn,
                            const policy::PolicyConfig& cfg, unsigned workers) {
  return collect(trajectories, workers,
                 [&](const AnnotatedTrajectory& t) { return policy::run_offline_task(t, act_fn, cfg); });
}

OutcomesBySplit run_oracle_select(std::span<const AnnotatedTrajectory> trajectories, const IntentPredictor& predictor,
                                  llm::ChatBackend& backend, const policy::PolicyConfig& cfg, unsigned workers) {
  policy::PolicyConfig single = cfg;
  single.hint_mode = policy::HintMode::FixedIntent;
  return collect(trajectories, workers, [&](const AnnotatedTrajectory& t) {
    std::vector<StepOutcome> out;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const PredictionContext ctx = context_for_step(t, i, cfg.view_size);
      const Step& gt = t.steps[i].step;
      std::vector<ScoredIntent> intents;
      std::string error;
      try {
        intents = predictor.predict_top_k(ctx, cfg.k_intents);
      } catch (const Error& e) {
        error = e.what();
      }
      if (intents.empty()) {
        out.push_back(policy::score_step(gt, policy::ActResult{std::nullopt, {}, error.empty() ? "no intents" : error}));
        continue;
      }
      std::vector<StepOutcome> per_rank;
      for (const auto& hint : intents)
        per_rank.push_back(policy::score_step(gt, policy::act(ctx, nullptr, backend, single, hint.intent)));
      out.push_back(oracle_select(per_rank));
    }
    return out;
  });
}

std::map<std::string, MetricsReport> reports_by_split(const OutcomesBySplit& outcomes,
                                                      const std::string& config_fingerprint) {
  std::map<std::string, MetricsReport> out;
  for (const auto& [split, tasks] : outcomes) out[split] = macro_report(tasks, config_fingerprint);
  return out;
}

AblationResult run_ablation(std::span<const AnnotatedTrajectory> trajectories, const IntentPredictor& predictor,
                            llm::ChatBackend& backend, const AblationConfig& cfg) {
  if (trajectories.empty()) throw EmptyDataset("ablation over zero trajectories");
  AblationResult result;
  for (Condition c : cfg.conditions) {
    policy::PolicyConfig pc = cfg.policy;
    OutcomesBySplit outcomes;
    switch (c) {
      case Condition::NoIntent:
        pc.hint_mode = policy::HintMode::None;
        break;
      case Condition::OneDiscoveredIntent:
        pc.hint_mode = policy::HintMode::FixedIntent;
        break;
      case Condition::Top1:
        pc.hint_mode = policy::HintMode::Top1;
        break;
      case Condition::TopK:
        pc.hint_mode = policy::HintMode::TopK;
        break;
      case Condition::OracleSelect:
        break;
    }
    if (c == Condition::OracleSelect) {
      outcomes = run_oracle_select(trajectories, predictor, backend, pc, cfg.workers);
    } else {
      policy::validate(pc);
      outcomes = run_offline(trajectories, policy::make_act_fn(&predictor, backend, pc), pc, cfg.workers);
    }
    result.reports[c] = reports_by_split(outcomes, cfg.config_fingerprint);
    result.outcomes[c] = std::move(outcomes);
  }
  return result;
}

std::vector<std::string> AblationResult::splits() const {
  std::vector<std::string> out;
  for (SplitTag tag : {SplitTag::Train, SplitTag::CrossTask, SplitTag::CrossWebsite, SplitTag::CrossDomain,
                       SplitTag::Other}) {
    const std::string name(to_string(tag));
    for (const auto& [c, by_split] : reports)
      if (by_split.contains(name)) {
        out.push_back(name);
        break;
      }
  }
  out.emplace_back(kAllSplits);
  return out;
}

std::vector<TableRow> AblationResult::table_rows() const {
  std::vector<TableRow> rows;
  for (const auto& [c, by_split] : reports) rows.push_back({std::string(to_string(c)), by_split});
  return rows;
}

nlohmann::json AblationResult::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [c, by_split] : reports) {
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [split, r] : by_split) s[split] = r.to_json();
    j[std::string(to_string(c))] = s;
  }
  return j;
}

}  // namespace autointent::eval
