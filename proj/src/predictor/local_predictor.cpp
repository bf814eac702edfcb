#include "autointent/predictor/local_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "autointent/errors.hpp"

namespace autointent {

std::size_t default_beam_width(std::size_t view_size) { return view_size <= 20 ? 12 : 8; }

double TokenDistribution::total() const {
  double s = end.value_or(0.0);
  for (const auto& [_, p] : words) s += p;
  return s;
}

LocalPredictor LocalPredictor::build(std::span<const dataset::AugmentedSample> samples, LocalPredictorConfig cfg) {
  std::vector<PredictionContext> contexts;
  std::vector<Intent> targets;
  contexts.reserve(samples.size());
  targets.reserve(samples.size());
  for (const auto& s : samples) {
    contexts.push_back(s.context);
    targets.push_back(s.target_intent);
  }
  return build(contexts, targets, cfg);
}

LocalPredictor LocalPredictor::build(std::span<const PredictionContext> contexts, std::span<const Intent> targets,
                                     LocalPredictorConfig cfg) {
  if (contexts.empty()) throw EmptyDataset("cannot build a predictor from zero samples");
  if (contexts.size() != targets.size()) throw DataError("contexts and targets differ in length");
  if (cfg.smoothing < 0.0 || !std::isfinite(cfg.smoothing)) throw ConfigError("smoothing must be finite and >= 0");
  if (cfg.neighbor_count == 0) throw ConfigError("neighbor_count must be positive");
  LocalPredictor p;
  p.cfg_ = cfg;
  for (const auto& z : targets) p.sample_terminal_.push_back(p.trie_.insert(z));
  p.index_ = ContextIndex::build(contexts, cfg.idf_floor);
  return p;
}

NeighborWeights LocalPredictor::neighbor_weights(const PredictionContext& ctx) const {
  NeighborWeights w;
  w.pass.assign(trie_.size(), 0.0);
  w.terminal.assign(trie_.size(), 0.0);
  double total = 0.0;
  for (const auto& n : index_.nearest(ctx, cfg_.neighbor_count)) {
    const std::size_t leaf = sample_terminal_[n.doc];
    w.terminal[leaf] += n.similarity;
    for (std::size_t at = leaf;; at = trie_.node(at).parent) {
      w.pass[at] += n.similarity;
      if (at == IntentTrie::kRoot) break;
    }
    total += n.similarity;
  }
  w.fallback_to_prior = !(total > 0.0);
  return w;
}

TokenDistribution LocalPredictor::distribution_at(const NeighborWeights& weights, std::size_t node) const {
  const auto& n = trie_.node(node);
  TokenDistribution d;
  const std::size_t support = n.children.size() + (n.terminal() ? 1 : 0);
  if (support == 0) return d;

  auto raw_sum = [&](bool prior) {
    double s = n.terminal() ? (prior ? n.terminal_weight : weights.terminal[node]) : 0.0;
    for (const auto& [_, c] : n.children) s += prior ? trie_.node(c).pass_weight : weights.pass[c];
    return s;
  };
  const bool prior = weights.fallback_to_prior || !(raw_sum(false) > 0.0);
  const double lambda = cfg_.smoothing;
  const double denom = raw_sum(prior) + lambda * static_cast<double>(support);
  for (const auto& [word, c] : n.children) {
    const double count = prior ? trie_.node(c).pass_weight : weights.pass[c];
    d.words.emplace(word, (count + lambda) / denom);
  }
  if (n.terminal()) {
    const double count = prior ? n.terminal_weight : weights.terminal[node];
    d.end = (count + lambda) / denom;
  }
  return d;
}

TokenDistribution LocalPredictor::conditional_distribution(const NeighborWeights& weights,
                                                           std::span<const std::string> prefix) const {
  auto node = trie_.find(prefix);
  if (!node) return {};
  return distribution_at(weights, *node);
}

TokenDistribution LocalPredictor::conditional_distribution(const PredictionContext& ctx,
                                                           std::span<const std::string> prefix) const {
  return conditional_distribution(neighbor_weights(ctx), prefix);
}

namespace {

struct Hypothesis {
  std::size_t node;
  double score;
  std::size_t tokens;
  bool finished;
  std::string text;
};

}  // namespace

std::vector<ScoredIntent> LocalPredictor::beam_search(const PredictionContext& ctx, std::size_t k,
                                                      std::size_t beam_width, std::size_t max_tokens) const {
  if (beam_width == 0 || k == 0 || k > beam_width) throw ConfigError("beam search needs 1 <= k <= beam_width");
  const NeighborWeights weights = neighbor_weights(ctx);

  std::vector<Hypothesis> live{{IntentTrie::kRoot, 0.0, 0, false, {}}};
  std::vector<Hypothesis> finished;
  while (!live.empty()) {
    std::vector<Hypothesis> cands;
    for (const auto& h : live) {
      if (h.tokens + 1 > max_tokens) continue;
      const TokenDistribution d = distribution_at(weights, h.node);
      for (const auto& [word, p] : d.words) {
        if (!(p > 0.0)) continue;
        const std::size_t child = *trie_.child(h.node, word);
        cands.push_back({child, h.score + std::log(p), h.tokens + 1, false, h.text.empty() ? word : h.text + " " + word});
      }
      if (d.end && *d.end > 0.0) cands.push_back({h.node, h.score + std::log(*d.end), h.tokens + 1, true, h.text});
    }
    std::sort(cands.begin(), cands.end(), [](const Hypothesis& a, const Hypothesis& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.text != b.text) return a.text < b.text;
      return a.finished && !b.finished;
    });
    live.clear();
    for (auto& c : cands) {
      if (c.finished) finished.push_back(std::move(c));
      else if (live.size() < beam_width) live.push_back(std::move(c));
    }
  }

  std::vector<ScoredIntent> out;
  out.reserve(finished.size());
  for (const auto& h : finished) out.push_back({Intent::from_words(trie_.path(h.node)), h.score});
  sort_and_dedup(out);
  if (out.size() > k) out.erase(out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
  return out;
}

std::vector<ScoredIntent> LocalPredictor::predict_top_k(const PredictionContext& ctx, std::size_t k) const {
  std::size_t width = cfg_.beam_width ? cfg_.beam_width : default_beam_width(ctx.candidate_view.size());
  width = std::max(width, k);
  return beam_search(ctx, k, width, cfg_.max_tokens);
}

void LocalPredictor::save(const std::filesystem::path& path) const {
  std::vector<std::string> targets;
  targets.reserve(sample_terminal_.size());
  for (auto t : sample_terminal_) targets.push_back(trie_.text(t));
  nlohmann::json j{{"schema", kPredictorSnapshotSchema},
                   {"config",
                    {{"smoothing", cfg_.smoothing},
                     {"neighbor_count", cfg_.neighbor_count},
                     {"idf_floor", cfg_.idf_floor},
                     {"beam_width", cfg_.beam_width},
                     {"max_tokens", cfg_.max_tokens}}},
                   {"targets", targets},
                   {"index", index_.to_json()}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

LocalPredictor LocalPredictor::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("predictor snapshot is not JSON: " + std::string(e.what()));
  }
  if (j.value("schema", std::string()) != kPredictorSnapshotSchema)
    throw DataError("predictor snapshot: unsupported schema");
  LocalPredictor p;
  try {
    const auto& c = j.at("config");
    p.cfg_.smoothing = c.at("smoothing").get<double>();
    p.cfg_.neighbor_count = c.at("neighbor_count").get<std::size_t>();
    p.cfg_.idf_floor = c.at("idf_floor").get<double>();
    p.cfg_.beam_width = c.at("beam_width").get<std::size_t>();
    p.cfg_.max_tokens = c.at("max_tokens").get<std::size_t>();
    for (const auto& t : j.at("targets")) p.sample_terminal_.push_back(p.trie_.insert(parse_canonical_intent(t.get<std::string>())));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("predictor snapshot: " + std::string(e.what()));
  }
  p.index_ = ContextIndex::from_json(j.at("index"));
  if (p.index_.size() != p.sample_terminal_.size()) throw DataError("predictor snapshot: index/targets mismatch");
  if (p.sample_terminal_.empty()) throw EmptyDataset("predictor snapshot has no samples");
  return p;
}

}  // namespace autointent
