#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <thread>

#include "autointent/errors.hpp"
#include "autointent/predictor/local_predictor.hpp"
#include "autointent/predictor/remote_predictor.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace autointent;
using nlohmann::json;

namespace {

PredictionContext booking_context() {
  PredictionContext ctx;
  ctx.task = "Book a table for two tonight";
  ctx.candidate_view = {fixtures::el("5", "button", "Find a table", 0.9), fixtures::el("6", "input", "Date", 0.5)};
  return ctx;
}

LocalPredictor date_time_predictor(double lambda) {
  const std::vector<PredictionContext> ctx(4, booking_context());
  const std::vector<Intent> targets{fixtures::intent("selecting date"), fixtures::intent("selecting date"),
                                    fixtures::intent("selecting date"), fixtures::intent("selecting time")};
  LocalPredictorConfig cfg;
  cfg.smoothing = lambda;
  return LocalPredictor::build(ctx, targets, cfg);
}

std::vector<std::string> words(std::string_view s) { return fixtures::intent(s).words(); }

// Neighbour-weighted (intent, similarity) pairs, or unit prior weights when
// no neighbour reaches `prefix`, as the independent formula oracle expects.
std::vector<std::pair<Intent, double>> oracle_weights(const LocalPredictor& p, const fixtures::RandomCorpus& c,
                                                      const PredictionContext& q,
                                                      const std::vector<std::string>& prefix) {
  auto extends = [&](const Intent& z) {
    return z.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), z.words().begin());
  };
  std::vector<std::pair<Intent, double>> out;
  double reaching = 0.0;
  for (const auto& n : p.index().nearest(q, p.config().neighbor_count)) {
    out.emplace_back(c.targets[n.doc], n.similarity);
    if (extends(c.targets[n.doc])) reaching += n.similarity;
  }
  if (!(reaching > 0.0)) {
    out.clear();
    for (const auto& z : c.targets) out.emplace_back(z, 1.0);
  }
  return out;
}

}  // namespace

TEST_CASE("hand-counted distribution at lambda 0") {
  const auto p = date_time_predictor(0.0);
  const auto d = p.conditional_distribution(booking_context(), words("selecting"));
  CHECK(d.words.size() == 2);
  CHECK(d.words.at("date") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(d.words.at("time") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(d.end.has_value());
  const auto root = p.conditional_distribution(booking_context(), std::vector<std::string>{});
  CHECK(root.words.at("selecting") == doctest::Approx(1.0));
  CHECK(p.conditional_distribution(booking_context(), words("choosing")).words.empty());
}

TEST_CASE("two-intent corpus ranks date before time") {
  const auto p = date_time_predictor(0.0);
  const auto top = p.beam_search(booking_context(), 2, 12, 5);
  REQUIRE(top.size() == 2);
  CHECK(top[0].intent.text() == "selecting date");
  CHECK(top[0].log_score == doctest::Approx(std::log(0.75)).epsilon(1e-12));
  CHECK(top[1].intent.text() == "selecting time");
  CHECK(top[1].log_score == doctest::Approx(std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("trie shares prefixes") {
  const auto p = date_time_predictor(0.1);
  const auto& t = p.trie();
  CHECK(t.size() == 4);  // root, selecting, date, time
  CHECK(t.terminals().size() == 2);
  const auto sel = t.find(words("selecting"));
  REQUIRE(sel);
  CHECK(t.node(*sel).children.size() == 2);
  CHECK(t.node(*sel).pass_weight == doctest::Approx(4.0));
  CHECK(t.node(*t.find(words("selecting date"))).terminal_weight == doctest::Approx(3.0));
}

TEST_CASE("large smoothing flattens the distribution") {
  const auto p = date_time_predictor(1e9);
  const auto d = p.conditional_distribution(booking_context(), words("selecting"));
  CHECK(d.words.at("date") == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.words.at("time") == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("a single-sample predictor always returns that intent") {
  const std::vector<PredictionContext> ctx{booking_context()};
  const std::vector<Intent> target{fixtures::intent("checking availability")};
  const auto p = LocalPredictor::build(ctx, target);
  Rng rng(3);
  const auto c = fixtures::random_corpus(rng);
  for (const auto& q : c.queries) CHECK(p.predict_top_k(q, 1).front().intent == target.front());
  CHECK(p.predict_top_k(c.queries.front(), 5).size() == 1);
}

TEST_CASE("distributions are normalized and match the smoothing formula") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fixtures::random_corpus(rng, 60, 12);
    LocalPredictorConfig cfg;
    cfg.smoothing = 0.05 + 0.1 * static_cast<double>(trial % 4);
    cfg.neighbor_count = 4 + static_cast<std::size_t>(trial);
    const auto p = LocalPredictor::build(c.contexts, c.targets, cfg);
    for (const auto& q : c.queries) {
      const auto w = p.neighbor_weights(q);
      for (std::size_t node = 0; node < p.trie().size(); ++node) {
        const auto d = p.distribution_at(w, node);
        const auto prefix = p.trie().path(node);
        CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-9));
        const auto expect = oracles::smoothed_next(oracle_weights(p, c, q, prefix), c.targets, prefix, cfg.smoothing);
        REQUIRE(expect.size() == d.words.size() + (d.end ? 1 : 0));
        for (const auto& [word, pr] : d.words) CHECK(pr == doctest::Approx(expect.at(word)).epsilon(1e-9));
        if (d.end) CHECK(*d.end == doctest::Approx(expect.at("<end>")).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("full-width beam search equals exhaustive enumeration") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const auto c = fixtures::random_corpus(rng);
    const auto p = LocalPredictor::build(c.contexts, c.targets);
    for (const auto& q : c.queries) {
      const auto all = oracles::exhaustive(p, q, 5);
      const auto beam = p.beam_search(q, all.size(), p.trie().size(), 5);
      CHECK(beam == all);
    }
  }
}

TEST_CASE("default width gives the exhaustive top-5 on the trend fixture") {
  const auto f = fixtures::trend_fixture();
  const auto p = fixtures::trend_predictor(f);
  for (const auto& traj : f.eval) {
    PredictionContext ctx;
    for (const auto& s : traj.steps) {
      ctx.task = s.step.observation.task;
      ctx.step_index = s.step.observation.step_index;
      ctx.candidate_view = s.step.observation.candidates;
      if (ctx.candidate_view.size() > 20) ctx.candidate_view.resize(20);
      const auto all = oracles::exhaustive(p, ctx, 5);
      const std::vector<ScoredIntent> top(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(5, all.size())));
      CHECK(p.beam_search(ctx, 5, 12, 5) == top);
      ctx.action_history.push_back(s.step.action);
      ctx.intent_history.push_back(s.intent);
    }
  }
}

TEST_CASE("results for k are a prefix of results for larger k") {
  Rng rng(5);
  const auto c = fixtures::random_corpus(rng, 120, 20);
  LocalPredictorConfig cfg;
  cfg.beam_width = 12;
  const auto p = LocalPredictor::build(c.contexts, c.targets, cfg);
  for (const auto& q : c.queries) {
    const auto full = p.predict_top_k(q, 12);
    for (std::size_t k = 1; k < 12; ++k) {
      const auto part = p.predict_top_k(q, k);
      REQUIRE(part.size() <= full.size());
      CHECK(std::equal(part.begin(), part.end(), full.begin()));
    }
    for (std::size_t i = 1; i < full.size(); ++i) {
      CHECK(full[i - 1].log_score >= full[i].log_score);
      CHECK(full[i - 1].intent != full[i].intent);
    }
  }
}

TEST_CASE("scores equal the sum of step log-probabilities") {
  Rng rng(17);
  const auto c = fixtures::random_corpus(rng, 80, 15);
  const auto p = LocalPredictor::build(c.contexts, c.targets);
  for (const auto& q : c.queries) {
    for (const auto& s : p.predict_top_k(q, 5)) {
      double sum = 0.0;
      std::vector<std::string> prefix;
      for (const auto& w : s.intent.words()) {
        sum += std::log(p.conditional_distribution(q, prefix).words.at(w));
        prefix.push_back(w);
      }
      sum += std::log(*p.conditional_distribution(q, prefix).end);
      CHECK(s.log_score == doctest::Approx(sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("default beam widths and argument checks") {
  CHECK(default_beam_width(20) == 12);
  CHECK(default_beam_width(40) == 8);
  const auto p = date_time_predictor(0.1);
  CHECK_THROWS_AS(p.beam_search(booking_context(), 3, 2, 5), ConfigError);
  CHECK_THROWS_AS(p.beam_search(booking_context(), 0, 2, 5), ConfigError);
  CHECK(p.predict_top_k(booking_context(), 1).size() == 1);
  CHECK_THROWS_AS(LocalPredictor::build(std::span<const dataset::AugmentedSample>{}), EmptyDataset);
}

TEST_CASE("builds and snapshots are deterministic") {
  Rng rng(8);
  const auto c = fixtures::random_corpus(rng, 50, 10);
  const auto a = LocalPredictor::build(c.contexts, c.targets);
  const auto b = LocalPredictor::build(c.contexts, c.targets);
  CHECK(a.index() == b.index());
  const auto dir = std::filesystem::temp_directory_path() / "autointent_predictor";
  std::filesystem::remove_all(dir);
  a.save(dir / "p.json");
  const auto loaded = LocalPredictor::load(dir / "p.json");
  CHECK(loaded.config() == a.config());
  CHECK(loaded.index() == a.index());
  for (const auto& q : c.queries) CHECK(loaded.predict_top_k(q, 5) == a.predict_top_k(q, 5));
  CHECK_THROWS_AS(LocalPredictor::load(dir / "missing.json"), DataError);
}

TEST_CASE("predictors are safe under concurrent callers") {
  const auto f = fixtures::trend_fixture(3, 8, 4);
  const auto p = fixtures::trend_predictor(f);
  std::vector<PredictionContext> queries;
  for (const auto& t : f.eval)
    for (std::size_t i = 0; i < t.steps.size(); ++i) queries.push_back(context_for_step(t, i, 20));
  std::vector<std::vector<ScoredIntent>> seq(queries.size()), par(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) seq[i] = p.predict_top_k(queries[i], 5);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < 4; ++w)
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < queries.size(); i += 4) par[i] = p.predict_top_k(queries[i], 5);
    });
  for (auto& t : threads) t.join();
  CHECK(seq == par);
}

TEST_CASE("remote predictor request and response contract") {
  const auto body = RemotePredictor::request_body(booking_context(), 5, 0);
  CHECK(body["input"] == featurize_text(booking_context()));
  CHECK(body["k"] == 5);
  CHECK(body["beam_width"] == 12);

  const auto parsed = RemotePredictor::parse_response(
      json::parse(R"({"predictions":[{"text":"selecting time","log_score":-1.2},
                                      {"text":"Selecting date","log_score":-0.3},
                                      {"text":"selecting date.","log_score":-2.0}]})"),
      5);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].scored.intent.text() == "selecting date");
  CHECK(parsed[0].scored.log_score == -0.3);
  CHECK(parsed[1].scored.intent.text() == "selecting time");

  const auto trunc = RemotePredictor::parse_response(
      json::parse(R"({"predictions":[{"text":"Selecting a new departure date","log_score":-0.5}]})"), 5);
  CHECK(trunc[0].scored.intent.text() == "selecting a new");
  CHECK(trunc[0].truncated);
  CHECK(trunc[0].raw_text == "Selecting a new departure date");

  CHECK_THROWS_AS(RemotePredictor::parse_response(json::parse(R"({"predictions":[{"text":"!!","log_score":-1}]})"), 5),
                  MalformedPrediction);
  CHECK_THROWS_AS(RemotePredictor::parse_response(json::parse(R"({"predictions":[{"text":"a","log_score":1}]})"), 5),
                  MalformedPrediction);
  CHECK_THROWS_AS(RemotePredictor::parse_response(json::object(), 5), MalformedPrediction);
}

TEST_CASE("remote predictor over an injected transport") {
  llm::HttpEndpointConfig cfg;
  cfg.url = "http://predictor.invalid/predict";
  auto clock = std::make_shared<llm::VirtualClock>();
  json seen;
  auto ok = std::make_shared<llm::HttpTransport>(cfg, [&](const std::string& b) {
    seen = json::parse(b);
    return llm::HttpResult{200, R"({"predictions":[{"text":"selecting date","log_score":-0.1},
                                                   {"text":"selecting time","log_score":-0.9}]})", {}};
  }, clock);
  RemotePredictor p(ok, 8);
  const auto top = p.predict_top_k(booking_context(), 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].intent.text() == "selecting date");
  CHECK(seen["beam_width"] == 8);

  int calls = 0;
  auto failing = std::make_shared<llm::HttpTransport>(cfg, [&](const std::string&) {
    ++calls;
    return llm::HttpResult{500, "", {}};
  }, clock);
  CHECK_THROWS_AS(RemotePredictor(failing).predict_top_k(booking_context(), 2), BackendError);
  CHECK(calls == 5);
}
