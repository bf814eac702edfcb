#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autointent/errors.hpp"
#include "autointent/predictor/context.hpp"
#include "autointent/rng.hpp"
#include "autointent/types.hpp"

namespace autointent::dataset {

struct SampleSource {
  std::string task_id;
  int step_index = 1;
  int variant_index = 0;

  friend auto operator<=>(const SampleSource&, const SampleSource&) = default;
};

// One training unit: a context whose candidate view is a random subset of
// the transition's top-ranked pool, always containing the ground truth.
struct AugmentedSample {
  PredictionContext context;
  Intent target_intent;
  std::uint64_t sample_seed = 0;
  SampleSource source;
  Action gt_action;
  std::set<std::string> gt_element_ids;

  friend bool operator==(const AugmentedSample&, const AugmentedSample&) = default;
};

struct AugmentConfig {
  std::size_t samples_per_transition = 32;
  std::size_t pool_top_m = 80;
  std::size_t view_size = 20;
};

struct TransitionHistory {
  std::vector<Action> actions;
  std::vector<Intent> intents;
};

/// Draws cfg.samples_per_transition views. Each view holds the
/// ground-truth element plus elements drawn without replacement from the
/// top pool_top_m candidates, min(view_size, pool size) in total, sorted
/// like the candidate list. A ground-truth element ranked below the pool
/// joins the pool. Each sample's view is a function of its sample_seed.
std::vector<AugmentedSample> augment_transition(const std::string& task_id, const AnnotatedStep& step,
                                                const TransitionHistory& history, Rng& rng,
                                                const AugmentConfig& cfg = {});

/// Per-transition generators derive from (seed, task_id, step_index).
std::vector<AugmentedSample> augment_trajectory(const AnnotatedTrajectory& trajectory, std::uint64_t seed,
                                                const AugmentConfig& cfg = {});

std::vector<AugmentedSample> augment_all(const std::vector<AnnotatedTrajectory>& trajectories, std::uint64_t seed,
                                         const AugmentConfig& cfg = {}, unsigned workers = 1);

/// round(fraction * n), at least 1 and at most n - 1.
std::size_t validation_count(std::size_t n_tasks, double holdout_fraction);

/// Task-level split. Both halves keep the input order.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_validation(const std::vector<T>& tasks,
                                                                   double holdout_fraction, Rng& rng) {
  if (tasks.size() < 2) throw DataError("split needs at least two tasks");
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<bool> held(tasks.size(), false);
  const std::size_t n_val = validation_count(tasks.size(), holdout_fraction);
  for (std::size_t i = 0; i < n_val; ++i) held[order[i]] = true;
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < tasks.size(); ++i) (held[i] ? out.second : out.first).push_back(tasks[i]);
  return out;
}

/// Augmented dataset file: the annotated-step fields for the sampled view
/// plus variant_index, candidate_view, sample_seed and both histories.
void save_augmented(const std::vector<AugmentedSample>& samples, const std::filesystem::path& path,
                    std::string_view config_fingerprint = {});
std::vector<AugmentedSample> load_augmented(const std::filesystem::path& path);

inline constexpr std::string_view kDefaultFinetuneTemplate = "{context}";

/// One {"input", "target"} record per sample, ordered by source. The input
/// is `prompt_template` with {context} replaced by featurize_text().
void export_finetune_records(std::vector<AugmentedSample> samples, const std::filesystem::path& path,
                             std::string_view prompt_template = kDefaultFinetuneTemplate);

struct FinetuneRecord {
  std::string input;
  std::string target;
};
std::vector<FinetuneRecord> load_finetune_records(const std::filesystem::path& path);

}  // namespace autointent::dataset
