#include "autointent/eval/recall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "autointent/errors.hpp"

namespace autointent::eval {

double dice_similarity(const Intent& a, const Intent& b) {
  const auto& wa = a.words();
  const auto& wb = b.words();
  std::map<std::string, int> counts;
  for (const auto& w : wa) ++counts[w];
  int overlap = 0;
  for (const auto& w : wb) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return 2.0 * overlap / static_cast<double>(wa.size() + wb.size());
}

bool recall_at_k(const Intent& label, std::span<const ScoredIntent> predictions, std::size_t k,
                 const SimilarityFn& similarity, double threshold) {
  if (k == 0) throw ConfigError("recall@k needs k >= 1");
  double best = 0.0;
  for (std::size_t i = 0; i < std::min(k, predictions.size()); ++i)
    best = std::max(best, similarity(label, predictions[i].intent));
  return best >= threshold;
}

RecallCurve recall_curve(std::span<const RecallItem> items, std::size_t k_max, const SimilarityFn& similarity,
                         double threshold, std::string backend_id) {
  if (items.empty()) throw EmptyDataset("recall curve over zero items");
  if (k_max == 0) throw ConfigError("recall curve needs k_max >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("similarity threshold must lie in [0, 1]");

  std::vector<std::size_t> hits(k_max + 1, 0);
  for (const auto& item : items) {
    // Running maximum, so recall@k is evaluated once per prefix.
    double best = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      if (k <= item.predictions.size()) best = std::max(best, similarity(item.label, item.predictions[k - 1].intent));
      if (best >= threshold) ++hits[k];
    }
  }
  RecallCurve curve;
  curve.similarity_threshold = threshold;
  curve.similarity_backend = std::move(backend_id);
  curve.n_items = items.size();
  for (std::size_t k = 1; k <= k_max; ++k)
    curve.points[k] = static_cast<double>(hits[k]) / static_cast<double>(items.size());
  return curve;
}

nlohmann::json RecallCurve::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [k, r] : points) pts.push_back({{"k", k}, {"recall", r}});
  return {{"schema", "auto-intent/recall-v1"},
          {"config_fingerprint", config_fingerprint},
          {"similarity_backend", similarity_backend},
          {"similarity_threshold", similarity_threshold},
          {"n_items", n_items},
          {"points", pts}};
}

std::string RecallCurve::to_tsv() const {
  std::string out = "k\trecall\n";
  char buf[64];
  for (const auto& [k, r] : points) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\n", k, r);
    out += buf;
  }
  return out;
}

EmbeddingSimilarity::EmbeddingSimilarity(std::shared_ptr<llm::HttpTransport> transport, std::string model)
    : transport_(std::move(transport)), model_(std::move(model)) {
  if (!transport_) throw ConfigError("embedding similarity needs a transport");
}

std::vector<double> EmbeddingSimilarity::embed(const std::string& text) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(text); it != cache_.end()) return it->second;
  }
  std::vector<double> v;
  try {
    const auto body = transport_->post_json({{"model", model_}, {"input", nlohmann::json::array({text})}});
    v = body.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const EmbeddingBackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw EmbeddingBackendError(std::string("embedding request failed: ") + e.what());
  }
  if (v.empty()) throw EmbeddingBackendError("embedding backend returned an empty vector");
  for (double x : v)
    if (!std::isfinite(x)) throw EmbeddingBackendError("embedding backend returned a non-finite value");
  std::lock_guard lock(mutex_);
  cache_.emplace(text, v);
  return v;
}

double EmbeddingSimilarity::operator()(const Intent& a, const Intent& b) const {
  const auto va = embed(a.text());
  const auto vb = embed(b.text());
  if (va.size() != vb.size()) throw EmbeddingBackendError("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

}  // namespace autointent::eval
