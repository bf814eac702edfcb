#include "autointent/predictor/remote_predictor.hpp"

#include <algorithm>
#include <cmath>

#include "autointent/errors.hpp"

namespace autointent {

RemotePredictor::RemotePredictor(std::shared_ptr<llm::HttpTransport> transport, std::size_t beam_width)
    : transport_(std::move(transport)), beam_width_(beam_width) {}

nlohmann::json RemotePredictor::request_body(const PredictionContext& ctx, std::size_t k, std::size_t beam_width) {
  if (beam_width == 0) beam_width = default_beam_width(ctx.candidate_view.size());
  return nlohmann::json{{"input", featurize_text(ctx)}, {"k", k}, {"beam_width", std::max(beam_width, k)}};
}

std::vector<RemotePrediction> RemotePredictor::parse_response(const nlohmann::json& body, std::size_t k) {
  if (!body.is_object() || !body.contains("predictions") || !body.at("predictions").is_array())
    throw MalformedPrediction("predictor response lacks a predictions array");
  std::vector<RemotePrediction> out;
  for (const auto& p : body.at("predictions")) {
    if (!p.is_object() || !p.contains("text") || !p.at("text").is_string() || !p.contains("log_score") ||
        !p.at("log_score").is_number())
      throw MalformedPrediction("prediction needs string text and numeric log_score");
    const std::string raw = p.at("text").get<std::string>();
    const double score = p.at("log_score").get<double>();
    if (!std::isfinite(score) || score > 0.0)
      throw MalformedPrediction("prediction '" + raw + "' has log_score outside (-inf, 0]");
    NormalizedIntent n = [&] {
      try {
        return normalize_intent(raw);
      } catch (const EmptyIntent&) {
        throw MalformedPrediction("prediction '" + raw + "' normalizes to an empty intent");
      }
    }();
    out.push_back({ScoredIntent{n.intent, score}, raw, n.truncated});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RemotePrediction& a, const RemotePrediction& b) { return scored_before(a.scored, b.scored); });
  std::vector<RemotePrediction> unique;
  for (auto& p : out) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const RemotePrediction& u) {
      return u.scored.intent == p.scored.intent;
    });
    if (!dup) unique.push_back(std::move(p));
  }
  if (unique.size() > k) unique.erase(unique.begin() + static_cast<std::ptrdiff_t>(k), unique.end());
  return unique;
}

std::vector<RemotePrediction> RemotePredictor::predict_detailed(const PredictionContext& ctx, std::size_t k) const {
  return parse_response(transport_->post_json(request_body(ctx, k, beam_width_)), k);
}

std::vector<ScoredIntent> RemotePredictor::predict_top_k(const PredictionContext& ctx, std::size_t k) const {
  std::vector<ScoredIntent> out;
  for (auto& p : predict_detailed(ctx, k)) out.push_back(std::move(p.scored));
  return out;
}

}  // namespace autointent
