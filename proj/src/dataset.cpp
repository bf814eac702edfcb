#include "autointent/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "autointent/parallel.hpp"
#include "autointent/text.hpp"
#include "autointent/trajectory_io.hpp"

namespace autointent::dataset {

using nlohmann::json;

std::vector<AugmentedSample> augment_transition(const std::string& task_id, const AnnotatedStep& step,
                                                const TransitionHistory& history, Rng& rng,
                                                const AugmentConfig& cfg) {
  const auto& candidates = step.step.observation.candidates;
  if (candidates.empty()) throw InsufficientCandidates(task_id + ": step has no candidates");
  if (cfg.view_size == 0 || cfg.pool_top_m < cfg.view_size)
    throw ConfigError("augmentation needs view_size >= 1 and pool_top_m >= view_size");
  const std::string& gt_id = step.step.action.element_id;
  auto gt_it = std::find_if(candidates.begin(), candidates.end(),
                            [&](const Element& e) { return e.element_id == gt_id; });
  if (gt_it == candidates.end())
    throw InsufficientCandidates(task_id + " step " + std::to_string(step.step.observation.step_index) +
                                 ": ground-truth element " + gt_id + " is not among the candidates");

  const std::size_t pool_n = std::min(cfg.pool_top_m, candidates.size());
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < pool_n; ++i) {
    if (candidates[i].element_id != gt_id) others.push_back(i);
  }
  const std::size_t gt_pos = static_cast<std::size_t>(gt_it - candidates.begin());
  const std::size_t take = std::min(cfg.view_size, others.size() + 1) - 1;

  std::vector<AugmentedSample> out;
  out.reserve(cfg.samples_per_transition);
  for (std::size_t v = 0; v < cfg.samples_per_transition; ++v) {
    const std::uint64_t sample_seed = rng.next();
    Rng local(sample_seed);
    std::vector<std::size_t> pick = others;
    // Partial Fisher-Yates: the first `take` slots are the draw.
    for (std::size_t i = 0; i < take; ++i) std::swap(pick[i], pick[i + local.uniform_index(pick.size() - i)]);
    pick.resize(take);
    pick.push_back(gt_pos);
    std::sort(pick.begin(), pick.end());  // candidate order is already rank order

    PredictionContext ctx;
    ctx.task = step.step.observation.task;
    ctx.step_index = step.step.observation.step_index;
    for (std::size_t i : pick) ctx.candidate_view.push_back(candidates[i]);
    ctx.action_history = history.actions;
    ctx.intent_history = history.intents;
    AugmentedSample s{std::move(ctx),
                      step.intent,
                      sample_seed,
                      SampleSource{task_id, step.step.observation.step_index, static_cast<int>(v)},
                      step.step.action,
                      step.step.gt_element_ids};
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AugmentedSample> augment_trajectory(const AnnotatedTrajectory& trajectory, std::uint64_t seed,
                                                const AugmentConfig& cfg) {
  std::vector<AugmentedSample> out;
  TransitionHistory history;
  for (const auto& step : trajectory.steps) {
    Rng rng(derive_seed(seed, trajectory.task_id, static_cast<std::uint64_t>(step.step.observation.step_index)));
    auto samples = augment_transition(trajectory.task_id, step, history, rng, cfg);
    std::move(samples.begin(), samples.end(), std::back_inserter(out));
    history.actions.push_back(step.step.action);
    history.intents.push_back(step.intent);
  }
  return out;
}

std::vector<AugmentedSample> augment_all(const std::vector<AnnotatedTrajectory>& trajectories, std::uint64_t seed,
                                         const AugmentConfig& cfg, unsigned workers) {
  std::vector<std::vector<AugmentedSample>> parts(trajectories.size());
  parallel_for(trajectories.size(), workers,
               [&](std::size_t i) { parts[i] = augment_trajectory(trajectories[i], seed, cfg); });
  std::vector<AugmentedSample> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

std::size_t validation_count(std::size_t n_tasks, double holdout_fraction) {
  if (n_tasks < 2) return 0;
  auto n = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(n_tasks)));
  return std::clamp<std::size_t>(n, 1, n_tasks - 1);
}

void save_augmented(const std::vector<AugmentedSample>& samples, const std::filesystem::path& path,
                    std::string_view config_fingerprint) {
  std::vector<json> records;
  records.reserve(samples.size());
  for (const auto& s : samples) {
    Observation view{s.context.task, s.context.step_index, s.context.candidate_view, std::nullopt};
    json actions = json::array();
    for (const auto& a : s.context.action_history) actions.push_back(io::to_json(a));
    std::vector<std::string> intents, ids;
    for (const auto& z : s.context.intent_history) intents.push_back(z.text());
    for (const auto& e : s.context.candidate_view) ids.push_back(e.element_id);
    json j{{"schema", kSchemaVersion},
           {"task_id", s.source.task_id},
           {"step_index", s.source.step_index},
           {"variant_index", s.source.variant_index},
           {"sample_seed", s.sample_seed},
           {"observation", io::to_json(view)},
           {"action", io::to_json(s.gt_action)},
           {"gt_element_ids", std::vector<std::string>(s.gt_element_ids.begin(), s.gt_element_ids.end())},
           {"intent", s.target_intent.text()},
           {"candidate_view", ids},
           {"action_history", std::move(actions)},
           {"intent_history", intents}};
    if (!config_fingerprint.empty()) j["config_fingerprint"] = config_fingerprint;
    records.push_back(std::move(j));
  }
  io::write_records(path, records);
}

std::vector<AugmentedSample> load_augmented(const std::filesystem::path& path) {
  std::vector<AugmentedSample> out;
  io::for_each_record(path, [&](const json& j, std::size_t line) {
    io::require_schema(j, line);
    SampleSource source;
    source.task_id = io::require_string(j, "task_id", line, "");
    source.step_index = static_cast<int>(io::require_int(j, "step_index", line, ""));
    source.variant_index = static_cast<int>(io::require_int(j, "variant_index", line, ""));
    const json& seed = io::require(j, "sample_seed", line, "");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
      throw SchemaError(line, "sample_seed", "expected an integer");
    Step step = io::step_from_json(j, line, "");
    PredictionContext ctx;
    ctx.task = step.observation.task;
    ctx.step_index = step.observation.step_index;
    ctx.candidate_view = std::move(step.observation.candidates);
    const json& ids = io::require(j, "candidate_view", line, "");
    if (!ids.is_array() || ids.size() != ctx.candidate_view.size())
      throw SchemaError(line, "candidate_view", "must list the ids of observation.candidates");
    const json& actions = io::require(j, "action_history", line, "");
    if (!actions.is_array()) throw SchemaError(line, "action_history", "expected an array");
    for (std::size_t i = 0; i < actions.size(); ++i)
      ctx.action_history.push_back(io::action_from_json(actions[i], line, "action_history[" + std::to_string(i) + "]"));
    const json& intents = io::require(j, "intent_history", line, "");
    if (!intents.is_array()) throw SchemaError(line, "intent_history", "expected an array");
    for (std::size_t i = 0; i < intents.size(); ++i) {
      const std::string path_i = "intent_history[" + std::to_string(i) + "]";
      if (!intents[i].is_string()) throw SchemaError(line, path_i, "expected a string");
      try {
        ctx.intent_history.push_back(parse_canonical_intent(intents[i].get<std::string>()));
      } catch (const DataError& e) {
        throw SchemaError(line, path_i, e.what());
      }
    }
    try {
      validate(ctx);
    } catch (const ValidationError& e) {
      throw SchemaError(line, "record", e.what());
    }
    auto target = [&]() {
      try {
        return parse_canonical_intent(io::require_string(j, "intent", line, ""));
      } catch (const SchemaError&) {
        throw;
      } catch (const DataError& e) {
        throw SchemaError(line, "intent", e.what());
      }
    }();
    AugmentedSample s{std::move(ctx), std::move(target), seed.get<std::uint64_t>(), std::move(source), step.action,
                      step.gt_element_ids};
    out.push_back(std::move(s));
  });
  return out;
}

void export_finetune_records(std::vector<AugmentedSample> samples, const std::filesystem::path& path,
                             std::string_view prompt_template) {
  std::stable_sort(samples.begin(), samples.end(),
                   [](const AugmentedSample& a, const AugmentedSample& b) { return a.source < b.source; });
  std::vector<json> records;
  records.reserve(samples.size());
  for (const auto& s : samples) {
    records.push_back(json{{"input", text::render_template(prompt_template, {{"context", featurize_text(s.context)}})},
                           {"target", s.target_intent.text()}});
  }
  io::write_records(path, records);
}

std::vector<FinetuneRecord> load_finetune_records(const std::filesystem::path& path) {
  std::vector<FinetuneRecord> out;
  io::for_each_record(path, [&](const json& j, std::size_t line) {
    out.push_back({io::require_string(j, "input", line, ""), io::require_string(j, "target", line, "")});
  });
  return out;
}

}  // namespace autointent::dataset
