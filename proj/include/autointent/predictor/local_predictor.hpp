#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autointent/dataset.hpp"
#include "autointent/predictor/context.hpp"
#include "autointent/predictor/context_index.hpp"
#include "autointent/predictor/intent_trie.hpp"

namespace autointent {

/// Top-k intent prediction behind one interface, local or remote.
class IntentPredictor {
 public:
  virtual ~IntentPredictor() = default;
  /// Sorted by score descending (ties by text), no duplicate texts.
  virtual std::vector<ScoredIntent> predict_top_k(const PredictionContext& ctx, std::size_t k) const = 0;
};

struct LocalPredictorConfig {
  double smoothing = 0.1;           // add-lambda over the support at each node
  std::size_t neighbor_count = 32;  // retrieved training contexts per query
  double idf_floor = 1e-6;
  std::size_t beam_width = 0;       // 0: derived from the candidate view size
  std::size_t max_tokens = 5;       // words plus the end marker

  friend bool operator==(const LocalPredictorConfig&, const LocalPredictorConfig&) = default;
};

/// 12 beams up to 20 candidates, 8 beyond.
std::size_t default_beam_width(std::size_t view_size);

/// Next-token distribution at a trie node. `end` is set when the node is
/// terminal. Probabilities over words and end sum to 1.
struct TokenDistribution {
  std::map<std::string, double> words;
  std::optional<double> end;

  double total() const;
};

/// Per-node weights accumulated from the retrieved neighbours of one context.
struct NeighborWeights {
  std::vector<double> pass;      // by trie node
  std::vector<double> terminal;  // by trie node
  bool fallback_to_prior = false;
};

// Retrieval-weighted smoothed counts over a trie of training intents:
// P(x | prefix) = (c(x) + lambda) / (sum c + lambda * |support|), where
// c(x) sums the similarities of retrieved neighbours whose intent extends
// the prefix with x. When no neighbour reaches the prefix the global
// training counts take the place of c.
class LocalPredictor final : public IntentPredictor {
 public:
  /// Throws EmptyDataset on empty input.
  static LocalPredictor build(std::span<const dataset::AugmentedSample> samples, LocalPredictorConfig cfg = {});
  static LocalPredictor build(std::span<const PredictionContext> contexts, std::span<const Intent> targets,
                              LocalPredictorConfig cfg = {});

  NeighborWeights neighbor_weights(const PredictionContext& ctx) const;

  /// Empty distribution when the prefix is not in the trie.
  TokenDistribution conditional_distribution(const NeighborWeights& weights, std::span<const std::string> prefix) const;
  TokenDistribution conditional_distribution(const PredictionContext& ctx, std::span<const std::string> prefix) const;
  TokenDistribution distribution_at(const NeighborWeights& weights, std::size_t node) const;

  /// Beam search without length normalization. Finished hypotheses are
  /// collected apart from the `beam_width` live ones; a width at least the
  /// trie size never prunes. Requires
  /// 1 <= k <= beam_width.
  std::vector<ScoredIntent> beam_search(const PredictionContext& ctx, std::size_t k, std::size_t beam_width,
                                        std::size_t max_tokens) const;

  /// Configured width, or default_beam_width of the view, widened to k.
  std::vector<ScoredIntent> predict_top_k(const PredictionContext& ctx, std::size_t k) const override;

  const IntentTrie& trie() const { return trie_; }
  const ContextIndex& index() const { return index_; }
  const LocalPredictorConfig& config() const { return cfg_; }
  std::size_t sample_count() const { return sample_terminal_.size(); }

  void save(const std::filesystem::path& path) const;
  static LocalPredictor load(const std::filesystem::path& path);

 private:
  LocalPredictorConfig cfg_;
  IntentTrie trie_;
  ContextIndex index_;
  std::vector<std::size_t> sample_terminal_;  // training sample -> terminal node
};

inline constexpr std::string_view kPredictorSnapshotSchema = "auto-intent/predictor-v1";

}  // namespace autointent
