#include "autointent/predictor/context_index.hpp"

#include <algorithm>
#include <cmath>

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent {

namespace {

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text::to_lower(s)) {
    unsigned char u = static_cast<unsigned char>(c);
    if ((u >= 'a' && u <= 'z') || (u >= '0' && u <= '9') || u >= 0x80) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double tf_weight(std::size_t tf) { return 1.0 + std::log(static_cast<double>(tf)); }

void normalize(ContextIndex::SparseVector& v) {
  double norm = 0.0;
  for (const auto& [_, w] : v) norm += w * w;
  if (norm <= 0.0) return;
  norm = std::sqrt(norm);
  for (auto& [_, w] : v) w /= norm;
}

}  // namespace

std::map<std::string, std::size_t> ContextIndex::features(const PredictionContext& ctx) {
  std::map<std::string, std::size_t> f;
  for (const auto& t : word_tokens(ctx.task)) ++f["t:" + t];
  ++f["s:" + std::to_string(std::min(ctx.step_index, 10))];
  if (!ctx.action_history.empty()) {
    const Action& last = ctx.action_history.back();
    ++f["a:" + text::to_lower(to_string(last.kind))];
    for (const auto& t : word_tokens(last.value)) ++f["av:" + t];
  } else {
    ++f["a:none"];
  }
  if (!ctx.intent_history.empty()) {
    const Intent& last = ctx.intent_history.back();
    ++f["zl:" + last.text()];
    for (const auto& w : last.words()) ++f["zw:" + w];
    for (const auto& z : ctx.intent_history) ++f["zh:" + z.text()];
  } else {
    ++f["zl:none"];
  }
  for (const auto& e : ctx.candidate_view) {
    ++f["ct:" + text::to_lower(e.tag)];
    for (const auto& t : word_tokens(e.text)) ++f["cw:" + t];
  }
  return f;
}

ContextIndex ContextIndex::build(std::span<const PredictionContext> contexts, double idf_floor) {
  ContextIndex index;
  std::vector<std::map<std::string, std::size_t>> feats;
  feats.reserve(contexts.size());
  std::map<std::string, std::size_t> df;
  for (const auto& ctx : contexts) {
    feats.push_back(features(ctx));
    for (const auto& [term, _] : feats.back()) ++df[term];
  }
  const double n = static_cast<double>(contexts.size());
  index.terms_.reserve(df.size());
  index.idf_.reserve(df.size());
  for (const auto& [term, count] : df) {
    index.terms_.push_back(term);
    index.idf_.push_back(std::max(std::log(n / static_cast<double>(count)), idf_floor));
  }
  index.docs_.reserve(feats.size());
  for (const auto& f : feats) index.docs_.push_back(index.weigh(f));
  index.build_postings();
  return index;
}

ContextIndex::SparseVector ContextIndex::weigh(const std::map<std::string, std::size_t>& feats) const {
  SparseVector v;
  for (const auto& [term, tf] : feats) {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
    if (it == terms_.end() || *it != term) continue;
    const auto id = static_cast<std::uint32_t>(it - terms_.begin());
    v.emplace_back(id, tf_weight(tf) * idf_[id]);
  }
  std::sort(v.begin(), v.end());
  normalize(v);
  return v;
}

void ContextIndex::build_postings() {
  postings_.assign(terms_.size(), {});
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (const auto& [term, w] : docs_[d]) postings_[term].emplace_back(static_cast<std::uint32_t>(d), w);
  }
}

ContextIndex::SparseVector ContextIndex::embed(const PredictionContext& query) const { return weigh(features(query)); }

std::vector<ContextIndex::Neighbor> ContextIndex::nearest(const PredictionContext& query, std::size_t m) const {
  const SparseVector q = embed(query);
  std::vector<double> score(docs_.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& [term, qw] : q) {
    for (const auto& [doc, dw] : postings_[term]) {
      if (score[doc] == 0.0) touched.push_back(doc);
      score[doc] += qw * dw;
    }
  }
  std::vector<Neighbor> out;
  out.reserve(touched.size());
  for (auto d : touched) {
    if (score[d] > 0.0) out.push_back({d, score[d]});
  }
  auto before = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.doc < b.doc;
  };
  if (out.size() > m) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(m), out.end(), before);
    out.resize(m);
  } else {
    std::sort(out.begin(), out.end(), before);
  }
  return out;
}

nlohmann::json ContextIndex::to_json() const {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : docs_) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& [t, w] : d) row.push_back(nlohmann::json::array({t, w}));
    docs.push_back(std::move(row));
  }
  return nlohmann::json{{"terms", terms_}, {"idf", idf_}, {"docs", std::move(docs)}};
}

ContextIndex ContextIndex::from_json(const nlohmann::json& j) {
  ContextIndex index;
  try {
    index.terms_ = j.at("terms").get<std::vector<std::string>>();
    index.idf_ = j.at("idf").get<std::vector<double>>();
    for (const auto& row : j.at("docs")) {
      SparseVector v;
      for (const auto& pair : row) v.emplace_back(pair.at(0).get<std::uint32_t>(), pair.at(1).get<double>());
      index.docs_.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("predictor snapshot: malformed index: ") + e.what());
  }
  if (index.terms_.size() != index.idf_.size()) throw DataError("predictor snapshot: terms/idf size mismatch");
  for (const auto& d : index.docs_) {
    for (const auto& [t, w] : d) {
      if (t >= index.terms_.size() || !std::isfinite(w) || w < 0.0)
        throw DataError("predictor snapshot: bad document entry");
    }
  }
  index.build_postings();
  return index;
}

}  // namespace autointent
