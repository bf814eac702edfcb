#pragma once

#include <memory>
#include <string>
#include <vector>

#include "autointent/llm/http.hpp"
#include "autointent/predictor/local_predictor.hpp"

namespace autointent {

struct RemotePrediction {
  ScoredIntent scored;
  std::string raw_text;
  bool truncated = false;
};

// Client for an externally hosted fine-tuned predictor. Wire contract:
//   request  {"input": featurize_text(ctx), "k": k, "beam_width": w}
//   response {"predictions": [{"text": "...", "log_score": -0.3}, ...]}
class RemotePredictor final : public IntentPredictor {
 public:
  RemotePredictor(std::shared_ptr<llm::HttpTransport> transport, std::size_t beam_width = 0);

  /// Normalized, sorted and deduplicated; duplicates keep their best score.
  /// Throws MalformedPrediction on empty phrases or invalid scores.
  std::vector<RemotePrediction> predict_detailed(const PredictionContext& ctx, std::size_t k) const;
  std::vector<ScoredIntent> predict_top_k(const PredictionContext& ctx, std::size_t k) const override;

  static nlohmann::json request_body(const PredictionContext& ctx, std::size_t k, std::size_t beam_width);
  static std::vector<RemotePrediction> parse_response(const nlohmann::json& body, std::size_t k);

 private:
  std::shared_ptr<llm::HttpTransport> transport_;
  std::size_t beam_width_;
};

}  // namespace autointent
