// autointent: intent discovery, prediction and intent-hinted evaluation of
// web-navigation trajectories.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "autointent/dataset.hpp"
#include "autointent/errors.hpp"
#include "autointent/eval/ablation.hpp"
#include "autointent/eval/recall.hpp"
#include "autointent/eval/report.hpp"
#include "autointent/extractor.hpp"
#include "autointent/llm/hint_following_backend.hpp"
#include "autointent/llm/http_chat_backend.hpp"
#include "autointent/llm/scripted_backend.hpp"
#include "autointent/parallel.hpp"
#include "autointent/policy.hpp"
#include "autointent/predictor/local_predictor.hpp"
#include "autointent/predictor/remote_predictor.hpp"
#include "autointent/run_config.hpp"
#include "autointent/text.hpp"
#include "autointent/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace autointent;

namespace {

// Flag values; anything left unset falls back to the config file, then to
// the RunConfig defaults.
struct Flags {
  std::string config;
  std::optional<std::string> input, output, prompts, script, hint_map, train, predictor;
  std::optional<std::string> backend, endpoint, model;
  std::optional<bool> allow_remote;
  std::optional<int> requests_per_minute;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> mode;
  std::optional<std::size_t> samples_per_transition, pool;
  std::optional<double> holdout;
  std::optional<std::size_t> k, beam_width, view_size, k_max;
  std::optional<std::string> predictor_backend, predictor_endpoint;
  std::optional<std::string> hint_mode, intent_history, conditions;
  std::optional<std::string> similarity, embedding_endpoint, embedding_model;
  std::optional<double> threshold;

  std::string save_predictor;
  std::string transcript;
};

template <typename T>
void apply(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
  apply(f.input, c.input);
  apply(f.output, c.output);
  apply(f.prompts, c.prompts);
  apply(f.script, c.script);
  apply(f.hint_map, c.hint_map);
  apply(f.train, c.train);
  apply(f.predictor, c.predictor);
  apply(f.backend, c.backend);
  apply(f.endpoint, c.endpoint);
  apply(f.model, c.model);
  apply(f.allow_remote, c.allow_remote);
  apply(f.requests_per_minute, c.requests_per_minute);
  apply(f.seed, c.seed);
  apply(f.workers, c.workers);
  apply(f.mode, c.mode);
  apply(f.samples_per_transition, c.samples_per_transition);
  apply(f.pool, c.pool);
  apply(f.holdout, c.holdout);
  apply(f.k, c.k);
  apply(f.beam_width, c.beam_width);
  apply(f.view_size, c.view_size);
  apply(f.k_max, c.k_max);
  apply(f.predictor_backend, c.predictor_backend);
  apply(f.predictor_endpoint, c.predictor_endpoint);
  apply(f.hint_mode, c.hint_mode);
  apply(f.intent_history, c.intent_history);
  apply(f.conditions, c.conditions);
  apply(f.similarity, c.similarity);
  apply(f.embedding_endpoint, c.embedding_endpoint);
  apply(f.embedding_model, c.embedding_model);
  apply(f.threshold, c.threshold);
  c.validate();
  return c;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--input", f.input, "input file");
  sub->add_option("--output", f.output, "output file or directory");
  sub->add_option("--seed", f.seed, "base random seed");
  sub->add_option("--workers", f.workers, "worker threads (default 1)");
  sub->add_option("--prompts", f.prompts, "directory overriding the built-in prompt texts");
  sub->add_flag("--allow-remote", f.allow_remote, "permit network backends");
}

void add_chat_backend(CLI::App* sub, Flags& f) {
  sub->add_option("--backend", f.backend, "scripted|hint|http");
  sub->add_option("--script", f.script, "scripted backend replies (JSON Lines)");
  sub->add_option("--hint-map", f.hint_map, "hint-following backend mappings (JSON Lines)");
  sub->add_option("--endpoint", f.endpoint, "chat completions URL");
  sub->add_option("--model", f.model, "model name sent to the endpoint");
  sub->add_option("--requests-per-minute", f.requests_per_minute, "rate limit, 0 for none");
}

void add_predictor(CLI::App* sub, Flags& f) {
  sub->add_option("--train", f.train, "augmented samples for the local predictor");
  sub->add_option("--predictor", f.predictor, "saved local predictor snapshot");
  sub->add_option("--predictor-backend", f.predictor_backend, "local|remote");
  sub->add_option("--predictor-endpoint", f.predictor_endpoint, "remote predictor URL");
  sub->add_option("--k", f.k, "number of intents");
  sub->add_option("--beam-width", f.beam_width, "beam width");
  sub->add_option("--view-size", f.view_size, "candidate elements shown");
}

void require_path(const std::string& value, const char* name) {
  if (value.empty()) throw ConfigError(std::string("missing required setting '") + name + "'");
}

PromptAssets assets_for(const RunConfig& c) {
  return c.prompts.empty() ? PromptAssets::builtin() : PromptAssets::load(c.prompts);
}

std::shared_ptr<llm::HttpTransport> transport_for(const RunConfig& c, const std::string& url) {
  require_path(url, "endpoint");
  llm::HttpEndpointConfig hc;
  hc.url = url;
  hc.api_key = llm::resolve_api_key(c.api_key_env, "");
  hc.timeout = std::chrono::seconds(c.timeout_s);
  hc.requests_per_minute = c.requests_per_minute;
  hc.jitter_seed = c.seed;
  return std::make_shared<llm::HttpTransport>(hc);
}

std::unique_ptr<llm::ChatBackend> chat_backend_for(const RunConfig& c) {
  if (c.backend == "scripted") {
    require_path(c.script, "script");
    return std::make_unique<llm::ScriptedBackend>(llm::load_script(c.script));
  }
  if (c.backend == "hint") {
    require_path(c.hint_map, "hint_map");
    return std::make_unique<llm::HintFollowingBackend>(llm::load_hint_map(c.hint_map));
  }
  require_path(c.model, "model");
  return std::make_unique<llm::HttpChatBackend>(c.model, transport_for(c, c.endpoint));
}

LocalPredictorConfig local_config(const RunConfig& c) {
  LocalPredictorConfig pc;
  pc.smoothing = c.smoothing;
  pc.neighbor_count = c.neighbor_count;
  pc.beam_width = c.resolved_beam_width();
  return pc;
}

std::unique_ptr<IntentPredictor> predictor_for(const RunConfig& c, const std::string& save_to = "") {
  if (c.predictor_backend == "remote")
    return std::make_unique<RemotePredictor>(transport_for(c, c.predictor_endpoint), c.resolved_beam_width());
  std::unique_ptr<LocalPredictor> p;
  if (!c.train.empty()) {
    p = std::make_unique<LocalPredictor>(LocalPredictor::build(dataset::load_augmented(c.train), local_config(c)));
  } else if (!c.predictor.empty()) {
    p = std::make_unique<LocalPredictor>(LocalPredictor::load(c.predictor));
  } else {
    throw ConfigError("the local predictor needs 'train' samples or a saved 'predictor' snapshot");
  }
  if (!save_to.empty()) p->save(save_to);
  return p;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_transcript(const std::string& path, const llm::ChatBackend& backend) {
  if (path.empty()) return;
  if (auto* s = dynamic_cast<const llm::ScriptedBackend*>(&backend)) {
    write_text(path, llm::transcript_to_jsonl(s->transcript()));
  } else if (auto* h = dynamic_cast<const llm::HintFollowingBackend*>(&backend)) {
    write_text(path, llm::transcript_to_jsonl(h->transcript()));
  } else {
    throw ConfigError("transcripts are only recorded by the scripted and hint backends");
  }
}

policy::PolicyConfig policy_config(const RunConfig& c) {
  auto pc = policy::PolicyConfig::defaults(c.view_size, assets_for(c));
  pc.k_intents = c.resolved_k();
  pc.hint_mode = *policy::parse_hint_mode(c.hint_mode);
  pc.intent_history = c.intent_history == "predicted" ? policy::IntentHistory::PredictedTop1
                                                      : policy::IntentHistory::Extractor;
  return pc;
}

// ---- commands ----

int cmd_extract(const Flags& f) {
  const RunConfig c = resolve(f);
  require_path(c.input, "input");
  require_path(c.output, "output");
  const auto trajectories = load_trajectories(c.input);
  auto backend = chat_backend_for(c);
  auto cfg = extractor::ExtractionPromptConfig::from_assets(assets_for(c));
  cfg.max_candidates_rendered = c.view_size;
  const auto mode = c.mode == "sampled" ? extractor::Mode::Sampled : extractor::Mode::Greedy;
  const auto results = extractor::extract_all(trajectories, *backend, cfg, mode, c.seed, c.workers);

  std::vector<AnnotatedTrajectory> annotated;
  extractor::ExtractionStats total;
  for (const auto& r : results) {
    annotated.push_back(r.trajectory);
    total += r.stats;
  }
  const std::string fp = c.fingerprint();
  save_annotated(annotated, c.output, fp);
  json stats = total.to_json();
  stats["config_fingerprint"] = fp;
  stats["trajectories"] = annotated.size();
  write_json(c.output + ".stats.json", stats);
  write_transcript(f.transcript, *backend);
  std::cout << "annotated " << annotated.size() << " trajectories (" << total.steps << " steps) -> " << c.output
            << "\n";
  return 0;
}

int cmd_build_dataset(const Flags& f) {
  const RunConfig c = resolve(f);
  require_path(c.input, "input");
  require_path(c.output, "output");
  const auto annotated = load_annotated(c.input);
  Rng rng(derive_seed(c.seed, "split"));
  const auto [train, validation] = dataset::split_train_validation(annotated, c.holdout, rng);

  dataset::AugmentConfig ac{c.samples_per_transition, c.pool, c.view_size};
  const auto train_samples = dataset::augment_all(train, c.seed, ac, c.workers);
  const auto val_samples = dataset::augment_all(validation, c.seed, ac, c.workers);

  const fs::path out(c.output);
  const std::string fp = c.fingerprint();
  dataset::save_augmented(train_samples, out / "train.jsonl", fp);
  dataset::save_augmented(val_samples, out / "validation.jsonl", fp);
  dataset::export_finetune_records(train_samples, out / "finetune_train.jsonl");
  dataset::export_finetune_records(val_samples, out / "finetune_validation.jsonl");

  json split{{"config_fingerprint", fp}, {"train", json::array()}, {"validation", json::array()}};
  for (const auto& t : train) split["train"].push_back(t.task_id);
  for (const auto& t : validation) split["validation"].push_back(t.task_id);
  write_json(out / "split.json", split);
  write_json(out / "finetune.meta.json", json{{"config_fingerprint", fp},
                                         {"template", dataset::kDefaultFinetuneTemplate},
                                         {"train_records", train_samples.size()},
                                         {"validation_records", val_samples.size()}});
  std::cout << "tasks: " << train.size() << " train / " << validation.size() << " validation; samples: "
            << train_samples.size() << " / " << val_samples.size() << " -> " << out.string() << "\n";
  return 0;
}

int cmd_predict(const Flags& f) {
  const RunConfig c = resolve(f);
  require_path(c.input, "input");
  require_path(c.output, "output");
  const auto annotated = load_annotated(c.input);
  const auto predictor = predictor_for(c, f.save_predictor);
  const std::string fp = c.fingerprint();
  const std::size_t k = c.resolved_k();

  std::vector<std::vector<json>> parts(annotated.size());
  parallel_for(annotated.size(), c.workers, [&](std::size_t t) {
    const auto& traj = annotated[t];
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
      const auto ctx = context_for_step(traj, i, c.view_size);
      json preds = json::array();
      for (const auto& s : predictor->predict_top_k(ctx, k))
        preds.push_back(json{{"intent", s.intent.text()}, {"log_score", s.log_score}});
      parts[t].push_back(json{{"schema", "auto-intent/predictions-v1"},
                          {"config_fingerprint", fp},
                          {"task_id", traj.task_id},
                          {"split", to_string(traj.split_tag)},
                          {"step_index", ctx.step_index},
                          {"label", traj.steps[i].intent.text()},
                          {"predictions", preds}});
    }
  });
  std::vector<json> records;
  for (auto& p : parts) records.insert(records.end(), p.begin(), p.end());
  io::write_records(c.output, records);
  std::cout << "predicted top-" << k << " intents for " << records.size() << " steps -> " << c.output << "\n";
  return 0;
}

json split_reports_json(const std::map<std::string, eval::MetricsReport>& reports) {
  json j = json::object();
  for (const auto& [split, r] : reports) j[split] = r.to_json();
  return j;
}

std::vector<std::string> split_order(const eval::OutcomesBySplit& outcomes) {
  std::vector<std::string> out;
  for (SplitTag tag : {SplitTag::Train, SplitTag::CrossTask, SplitTag::CrossWebsite, SplitTag::CrossDomain,
                       SplitTag::Other}) {
    const std::string name(to_string(tag));
    if (outcomes.contains(name)) out.push_back(name);
  }
  out.emplace_back(eval::kAllSplits);
  return out;
}

int cmd_run(const Flags& f) {
  const RunConfig c = resolve(f);
  require_path(c.input, "input");
  require_path(c.output, "output");
  const auto annotated = load_annotated(c.input);
  const auto pc = policy_config(c);
  policy::validate(pc);
  std::unique_ptr<IntentPredictor> predictor;
  if (pc.hint_mode == policy::HintMode::Top1 || pc.hint_mode == policy::HintMode::TopK)
    predictor = predictor_for(c, f.save_predictor);
  auto backend = chat_backend_for(c);

  const auto outcomes = eval::run_offline(annotated, policy::make_act_fn(predictor.get(), *backend, pc), pc, c.workers);
  const std::string fp = c.fingerprint();
  const auto reports = eval::reports_by_split(outcomes, fp);

  const fs::path out(c.output);
  write_json(out / "report.json", json{{"config_fingerprint", fp}, {"hint_mode", c.hint_mode}, {"splits", split_reports_json(reports)}});
  std::vector<json> records;
  for (const auto& [task, steps] : outcomes.at(std::string(eval::kAllSplits)))
    for (const auto& o : steps) {
      json r = eval::outcome_to_json(o);
      r["task_id"] = task;
      r["config_fingerprint"] = fp;
      records.push_back(std::move(r));
    }
  io::write_records(out / "outcomes.jsonl", records);
  const std::string table = eval::render_table({{c.hint_mode, reports}}, split_order(outcomes));
  write_text(out / "table.txt", table);
  write_transcript(f.transcript, *backend);
  std::cout << table;
  return 0;
}

int cmd_ablate(const Flags& f) {
  const RunConfig c = resolve(f);
  require_path(c.input, "input");
  require_path(c.output, "output");
  const auto annotated = load_annotated(c.input);
  eval::AblationConfig ac;
  ac.policy = policy_config(c);
  ac.workers = c.workers;
  ac.config_fingerprint = c.fingerprint();
  ac.conditions.clear();
  for (const auto& name : text::split_on(c.conditions, ',')) {
    auto cond = eval::parse_condition(text::trim(name));
    if (!cond) throw ConfigError("unknown ablation condition '" + name + "'");
    ac.conditions.push_back(*cond);
  }
  if (ac.conditions.empty()) throw ConfigError("no ablation conditions");
  const auto predictor = predictor_for(c, f.save_predictor);
  auto backend = chat_backend_for(c);
  const auto result = eval::run_ablation(annotated, *predictor, *backend, ac);

  const fs::path out(c.output);
  write_json(out / "ablation.json", json{{"config_fingerprint", ac.config_fingerprint}, {"conditions", result.to_json()}});
  const std::string table = eval::render_table(result.table_rows(), result.splits());
  write_text(out / "table.txt", table);
  write_transcript(f.transcript, *backend);
  std::cout << table;
  return 0;
}

int cmd_recall(const Flags& f) {
  const RunConfig c = resolve(f);
  require_path(c.input, "input");
  require_path(c.output, "output");
  std::map<std::string, std::vector<eval::RecallItem>> by_split;
  io::for_each_record(c.input, [&](const json& j, std::size_t line) {
    const std::string path = c.input;
    std::vector<ScoredIntent> preds;
    const auto& arr = io::require(j, "predictions", line, path);
    if (!arr.is_array()) throw SchemaError(line, "predictions", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      preds.push_back({parse_canonical_intent(io::require_string(arr[i], "intent", line, path)),
                       io::require_number(arr[i], "log_score", line, path)});
    eval::RecallItem item{parse_canonical_intent(io::require_string(j, "label", line, path)), std::move(preds)};
    by_split[j.value("split", std::string(to_string(SplitTag::Other)))].push_back(item);
    by_split[std::string(eval::kAllSplits)].push_back(std::move(item));
  });
  if (by_split.empty()) throw EmptyDataset("no predictions in " + c.input);

  eval::SimilarityFn similarity = eval::dice_similarity;
  std::string backend_id = "dice";
  std::shared_ptr<eval::EmbeddingSimilarity> embedding;
  if (c.similarity == "embedding") {
    require_path(c.embedding_model, "embedding_model");
    embedding = std::make_shared<eval::EmbeddingSimilarity>(transport_for(c, c.embedding_endpoint), c.embedding_model);
    similarity = [embedding](const Intent& a, const Intent& b) { return (*embedding)(a, b); };
    backend_id = embedding->id();
  }
  const std::string fp = c.fingerprint();
  const fs::path out(c.output);
  json curves = json::object();
  std::string tsv;
  for (const auto& [split, items] : by_split) {
    auto curve = eval::recall_curve(items, c.k_max, similarity, c.threshold, backend_id);
    curve.config_fingerprint = fp;
    curves[split] = curve.to_json();
    write_text(out / ("recall_" + split + ".tsv"), "# config_fingerprint " + fp + "\n" + curve.to_tsv());
    if (split == eval::kAllSplits) tsv = curve.to_tsv();
  }
  write_json(out / "recall.json", json{{"config_fingerprint", fp}, {"splits", curves}});
  std::cout << tsv;
  return 0;
}

int exit_code_for(const std::exception& e, std::string& kind) {
  if (dynamic_cast<const ConfigError*>(&e)) return kind = "config", 2;
  if (dynamic_cast<const BackendError*>(&e)) return kind = "backend", 3;
  if (dynamic_cast<const DataError*>(&e)) return kind = "data", 4;
  if (dynamic_cast<const PromptTooLong*>(&e)) return kind = "data", 4;
  return kind = "internal", 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intent discovery, prediction and intent-hinted offline evaluation"};
  app.require_subcommand(1);
  Flags f;

  auto* extract = app.add_subcommand("extract", "annotate trajectories with intents");
  add_common(extract, f);
  add_chat_backend(extract, f);
  extract->add_option("--mode", f.mode, "greedy|sampled");
  extract->add_option("--view-size", f.view_size, "candidate elements shown");
  extract->add_option("--transcript", f.transcript, "write the mock backend transcript here");

  auto* build = app.add_subcommand("build-dataset", "augment, split and export training data");
  add_common(build, f);
  build->add_option("--samples-per-transition", f.samples_per_transition, "views sampled per step");
  build->add_option("--pool", f.pool, "top-ranked candidates to sample from");
  build->add_option("--holdout", f.holdout, "validation fraction of tasks");
  build->add_option("--view-size", f.view_size, "elements per sampled view");

  auto* predict = app.add_subcommand("predict", "emit top-k intents per step");
  add_common(predict, f);
  add_predictor(predict, f);
  predict->add_option("--save-predictor", f.save_predictor, "save the built local predictor here");

  auto* run = app.add_subcommand("run", "offline policy evaluation");
  add_common(run, f);
  add_chat_backend(run, f);
  add_predictor(run, f);
  run->add_option("--hint-mode", f.hint_mode, "none|top1|topk|fixed");
  run->add_option("--intent-history", f.intent_history, "extractor|predicted");
  run->add_option("--save-predictor", f.save_predictor, "save the built local predictor here");
  run->add_option("--transcript", f.transcript, "write the mock backend transcript here");

  auto* ablate = app.add_subcommand("ablate", "compare hint conditions");
  add_common(ablate, f);
  add_chat_backend(ablate, f);
  add_predictor(ablate, f);
  ablate->add_option("--conditions", f.conditions, "comma list of none,fixed,top1,topk,oracle");
  ablate->add_option("--intent-history", f.intent_history, "extractor|predicted");
  ablate->add_option("--transcript", f.transcript, "write the mock backend transcript here");

  auto* recall = app.add_subcommand("recall", "recall@k of intent labels");
  add_common(recall, f);
  recall->add_option("--k-max", f.k_max, "largest k");
  recall->add_option("--similarity", f.similarity, "dice|embedding");
  recall->add_option("--threshold", f.threshold, "similarity needed to count a label as recalled");
  recall->add_option("--embedding-endpoint", f.embedding_endpoint, "embeddings URL");
  recall->add_option("--embedding-model", f.embedding_model, "embedding model name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed()) return cmd_extract(f);
    if (build->parsed()) return cmd_build_dataset(f);
    if (predict->parsed()) return cmd_predict(f);
    if (run->parsed()) return cmd_run(f);
    if (ablate->parsed()) return cmd_ablate(f);
    if (recall->parsed()) return cmd_recall(f);
  } catch (const std::exception& e) {
    std::string kind;
    const int rc = exit_code_for(e, kind);
    std::cerr << json{{"error", kind}, {"message", e.what()}, {"exit_code", rc}}.dump() << "\n";
    return rc;
  }
  return 2;
}
