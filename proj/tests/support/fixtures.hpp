#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "autointent/dataset.hpp"
#include "autointent/eval/report.hpp"
#include "autointent/llm/hint_following_backend.hpp"
#include "autointent/llm/scripted_backend.hpp"
#include "autointent/predictor/local_predictor.hpp"
#include "autointent/rng.hpp"
#include "autointent/types.hpp"

namespace fixtures {

using namespace autointent;

Element el(std::string id, std::string tag, std::string text, double score);
Action click(std::string id);
Action type(std::string id, std::string value);
Action select(std::string id, std::string value);
Intent intent(std::string_view text);

Step make_step(std::string task, int index, std::vector<Element> candidates, Action action,
               std::set<std::string> extra_gt = {});
AnnotatedTrajectory annotate(const Trajectory& t, const std::vector<std::string>& intents);

/// Outcome with a predicted action (or none) against a ground-truth step.
StepOutcome outcome(const Step& gt, std::optional<Action> predicted);

// Three tasks, 13 steps: CLICK, SELECT and TYPE; two steps with several
// ground-truth elements; per-task step counts differ so macro and micro
// averages disagree. Expected values are hand counted in the tests.
eval::OutcomesByTask metric_fixture();

// Multi-site booking trajectories. Element ids are unique per step, and in
// `eval` the ground-truth element is the top-ranked candidate in a minority
// of steps. Some templates randomize the order of two middle steps so a
// predictor cannot always rank the right intent first.
struct TrendFixture {
  std::vector<AnnotatedTrajectory> train;
  std::vector<AnnotatedTrajectory> eval;
  std::vector<llm::HintMapping> mappings;  // (task, gt intent) -> gt action, eval tasks only
};
TrendFixture trend_fixture(std::uint64_t seed = 7, std::size_t n_train = 48, std::size_t n_eval = 24);

/// Predictor trained on augmented samples of the fixture's train split.
LocalPredictor trend_predictor(const TrendFixture& f, std::uint64_t seed = 11);

// Five raw trajectories plus a script that answers each extraction prompt
// by the ground-truth action it contains. One step first answers with an
// over-long phrase. In `sampled_script` every step has five paraphrases.
struct ExtractionFixture {
  std::vector<Trajectory> trajectories;
  std::vector<llm::ScriptEntry> script;
  std::vector<llm::ScriptEntry> sampled_script;
  std::map<std::string, std::vector<std::string>> expected;  // task_id -> greedy intents
};
ExtractionFixture extraction_fixture();

// Random retrieval corpus for beam-search checks.
struct RandomCorpus {
  std::vector<PredictionContext> contexts;
  std::vector<Intent> targets;
  std::vector<PredictionContext> queries;
};
RandomCorpus random_corpus(Rng& rng, std::size_t max_intents = 200, std::size_t max_vocab = 30);

/// Random outcome set over `n_tasks` tasks for metric property checks.
eval::OutcomesByTask random_outcomes(Rng& rng, std::size_t n_tasks, std::size_t max_steps);

/// Writes the trend and extraction fixtures as JSON Lines for CLI runs:
/// raw.jsonl, script.jsonl, train_annotated.jsonl, eval_annotated.jsonl,
/// hint_map.jsonl.
void write_fixture_files(const std::filesystem::path& dir);

}  // namespace fixtures
