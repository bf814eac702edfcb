#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "autointent/llm/http.hpp"
#include "autointent/predictor/context.hpp"

namespace autointent::eval {

/// Similarity in [0, 1]; larger means closer.
using SimilarityFn = std::function<double(const Intent& label, const Intent& prediction)>;

/// 2|A ∩ B| / (|A| + |B|) over word multisets.
double dice_similarity(const Intent& a, const Intent& b);

/// True when the best similarity among the first k predictions reaches
/// `threshold`. An empty prefix has similarity 0. Throws ConfigError for k = 0.
bool recall_at_k(const Intent& label, std::span<const ScoredIntent> predictions, std::size_t k,
                 const SimilarityFn& similarity, double threshold);

struct RecallItem {
  Intent label;
  std::vector<ScoredIntent> predictions;  // sorted, best first
};

struct RecallCurve {
  std::map<std::size_t, double> points;
  double similarity_threshold = 0.7;
  std::string similarity_backend;
  std::size_t n_items = 0;
  std::string config_fingerprint;

  nlohmann::json to_json() const;
  /// "k<TAB>recall" lines for plotting.
  std::string to_tsv() const;
};

inline constexpr double kDefaultRecallThreshold = 0.7;

/// Mean of recall_at_k over items for k = 1..k_max. Throws EmptyDataset
/// without items and ConfigError when k_max = 0 or the threshold is
/// outside [0, 1].
RecallCurve recall_curve(std::span<const RecallItem> items, std::size_t k_max, const SimilarityFn& similarity,
                         double threshold, std::string backend_id);

// Cosine similarity of embeddings from an OpenAI-style endpoint:
//   request  {"model": m, "input": ["text"]}
//   response {"data": [{"embedding": [...]}]}
// Negative cosines clamp to 0. Embeddings are cached per text. Any failure
// raises EmbeddingBackendError.
class EmbeddingSimilarity {
 public:
  EmbeddingSimilarity(std::shared_ptr<llm::HttpTransport> transport, std::string model);

  double operator()(const Intent& a, const Intent& b) const;
  std::vector<double> embed(const std::string& text) const;
  std::string id() const { return "embedding:" + model_; }

 private:
  std::shared_ptr<llm::HttpTransport> transport_;
  std::string model_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<double>> cache_;
};

}  // namespace autointent::eval
