#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "autointent/predictor/context.hpp"

namespace autointent {

// TF-IDF bag-of-tokens index over training contexts. Features are
// namespaced tokens drawn from the task, the step index, the last action,
// the intent history and the candidate tags and texts. Document vectors
// are L2-normalized so a dot product is cosine similarity.
class ContextIndex {
 public:
  using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

  struct Neighbor {
    std::size_t doc;
    double similarity;
  };

  static ContextIndex build(std::span<const PredictionContext> contexts, double idf_floor);

  /// Raw feature tokens with multiplicity, sorted.
  static std::map<std::string, std::size_t> features(const PredictionContext& ctx);

  /// Up to `m` documents with positive similarity, by similarity
  /// descending then document index ascending.
  std::vector<Neighbor> nearest(const PredictionContext& query, std::size_t m) const;

  /// Normalized query vector over known terms.
  SparseVector embed(const PredictionContext& query) const;

  std::size_t size() const { return docs_.size(); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  const SparseVector& document(std::size_t i) const { return docs_[i]; }
  double idf(std::uint32_t term) const { return idf_[term]; }

  nlohmann::json to_json() const;
  static ContextIndex from_json(const nlohmann::json& j);

  friend bool operator==(const ContextIndex&, const ContextIndex&) = default;

 private:
  SparseVector weigh(const std::map<std::string, std::size_t>& feats) const;
  void build_postings();

  std::vector<std::string> terms_;  // sorted; position is the term id
  std::vector<double> idf_;
  std::vector<SparseVector> docs_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings_;  // term -> (doc, weight)
};

}  // namespace autointent
