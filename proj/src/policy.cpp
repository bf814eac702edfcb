#include "autointent/policy.hpp"

#include <regex>

#include "autointent/errors.hpp"
#include "autointent/eval/metrics.hpp"
#include "autointent/prompt_format.hpp"
#include "autointent/render.hpp"
#include "autointent/text.hpp"

namespace autointent::policy {

std::string_view to_string(HintMode mode) {
  switch (mode) {
    case HintMode::None: return "none";
    case HintMode::Top1: return "top1";
    case HintMode::TopK: return "topk";
    case HintMode::FixedIntent: return "fixed";
  }
  return "none";
}

std::optional<HintMode> parse_hint_mode(std::string_view s) {
  if (s == "none") return HintMode::None;
  if (s == "top1") return HintMode::Top1;
  if (s == "topk") return HintMode::TopK;
  if (s == "fixed" || s == "fixed_intent") return HintMode::FixedIntent;
  return std::nullopt;
}

PolicyConfig PolicyConfig::defaults(std::size_t view_size, const PromptAssets& assets) {
  PolicyConfig cfg;
  cfg.view_size = view_size;
  cfg.k_intents = view_size <= 20 ? 5 : 7;
  cfg.system_preamble = assets.policy_system;
  cfg.query_template = assets.policy_query;
  cfg.in_context_examples = assets.policy_examples;
  return cfg;
}

void validate(const PolicyConfig& cfg) {
  if (cfg.view_size == 0) throw ConfigError("policy view_size must be positive");
  if (cfg.k_intents == 0) throw ConfigError("policy k_intents must be positive");
  if (cfg.hint_mode == HintMode::TopK && cfg.k_intents < 2) throw ConfigError("hint_mode=topk needs k_intents >= 2");
  if (!(cfg.temperature >= 0.0)) throw ConfigError("policy temperature must be >= 0");
}

namespace {

llm::ChatRequest assemble(const Observation& observation, std::span<const Action> history,
                          std::span<const ScoredIntent> intents, const PolicyConfig& cfg, std::size_t text_cap,
                          bool with_attributes) {
  std::vector<std::string> actions;
  for (const auto& a : history) actions.push_back(render_action_brief(a));
  std::string intent_section;
  if (cfg.hint_mode != HintMode::None) {
    std::vector<std::string> listed;
    for (const auto& s : intents) listed.push_back(s.intent.text());
    intent_section = std::string(prompt_format::kNextIntents) +
                     " (examine them together and act with an appropriate one):\n" + render_numbered(listed) + "\n";
  }
  const std::string query = text::render_template(
      cfg.query_template,
      {{"task", observation.task},
       {"previous_actions", render_numbered(actions)},
       {"candidates", render_candidates(observation.candidates, cfg.view_size, text_cap, with_attributes)},
       {"intent_section", intent_section}});

  llm::ChatRequest req;
  req.messages.push_back({llm::Role::System, cfg.system_preamble});
  for (const auto& ex : cfg.in_context_examples) {
    req.messages.push_back({llm::Role::User, ex.input});
    req.messages.push_back({llm::Role::Assistant, ex.output});
  }
  req.messages.push_back({llm::Role::User, query});
  req.temperature = cfg.temperature;
  req.max_tokens = cfg.max_tokens;
  req.n_samples = 1;
  return req;
}

}  // namespace

llm::ChatRequest build_policy_prompt(const Observation& observation, std::span<const Action> action_history,
                                     std::span<const ScoredIntent> intents, const PolicyConfig& cfg) {
  validate(cfg);
  switch (cfg.hint_mode) {
    case HintMode::None: intents = {}; break;
    case HintMode::Top1:
    case HintMode::FixedIntent:
      if (intents.empty()) throw ConfigError("hint mode " + std::string(to_string(cfg.hint_mode)) + " needs an intent");
      intents = intents.first(1);
      break;
    case HintMode::TopK:
      if (intents.empty()) throw ConfigError("hint mode topk needs at least one intent");
      if (intents.size() > cfg.k_intents) intents = intents.first(cfg.k_intents);
      break;
  }
  for (std::size_t cap = cfg.max_element_text;; cap /= 2) {
    auto req = assemble(observation, action_history, intents, cfg, cap, true);
    if (llm::render_prompt(req).size() <= cfg.max_prompt_chars) return req;
    if (cap == 0) break;
  }
  auto req = assemble(observation, action_history, intents, cfg, 0, false);
  if (llm::render_prompt(req).size() <= cfg.max_prompt_chars) return req;
  throw PromptTooLong("policy prompt for step " + std::to_string(observation.step_index) + " exceeds " +
                      std::to_string(cfg.max_prompt_chars) + " characters");
}

Action parse_action_response(std::string_view completion, std::span<const Element> view) {
  static const std::regex kind_re(R"re(\b(click|select|type)\b)re", std::regex::icase);
  static const std::regex tag_ref(R"re(^\s*<\s*[A-Za-z0-9_-]*\s*id\s*=\s*"?([^\s"/>]+)"?[^>]*>)re", std::regex::icase);
  static const std::regex id_ref(R"re(^\s*\[?\s*id\s*=\s*"?([^\s"\]]+)"?\s*\]?)re", std::regex::icase);
  static const std::regex index_ref(R"re(^\s*[\[(](\d+)[\])])re");

  for (const auto& raw : text::split_lines(completion)) {
    std::smatch m;
    if (!std::regex_search(raw, m, kind_re)) continue;
    const ActionKind kind = *parse_action_kind(m[1].str());
    const std::string rest = m.suffix().str();

    std::string element_id, value;
    std::smatch r;
    if (std::regex_search(rest, r, tag_ref) || std::regex_search(rest, r, id_ref)) {
      element_id = r[1].str();
      value = r.suffix().str();
    } else if (std::regex_search(rest, r, index_ref)) {
      const std::size_t idx = std::stoul(r[1].str());
      if (idx == 0 || idx > view.size())
        throw UnknownElement("candidate index " + r[1].str() + " outside the view of " + std::to_string(view.size()));
      element_id = view[idx - 1].element_id;
      value = r.suffix().str();
    } else {
      throw UnparseableAction("no element reference after " + m[1].str() + " in '" + raw + "'");
    }

    std::string_view v = text::trim(value);
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
      v = text::trim(v.substr(1, v.size() - 2));

    const bool known = std::any_of(view.begin(), view.end(), [&](const Element& e) { return e.element_id == element_id; });
    if (!known) throw UnknownElement("element " + element_id + " is not in the candidate view");

    Action a{kind, element_id, kind == ActionKind::Click ? std::string() : std::string(v)};
    if (kind != ActionKind::Click && a.value.empty())
      throw UnparseableAction(std::string(to_string(kind)) + " without a value in '" + raw + "'");
    return a;
  }
  throw UnparseableAction("no action in reply '" + std::string(text::trim(completion)).substr(0, 120) + "'");
}

ActResult act(const PredictionContext& ctx, const IntentPredictor* predictor, llm::ChatBackend& backend,
              const PolicyConfig& cfg, const std::optional<Intent>& fixed) {
  ActResult result;
  try {
    switch (cfg.hint_mode) {
      case HintMode::None: break;
      case HintMode::FixedIntent:
        if (!fixed) throw ConfigError("hint mode fixed needs an intent");
        result.intents.push_back({*fixed, 0.0});
        break;
      case HintMode::Top1:
      case HintMode::TopK:
        if (!predictor) throw ConfigError("hint mode " + std::string(to_string(cfg.hint_mode)) + " needs a predictor");
        result.intents = predictor->predict_top_k(ctx, cfg.hint_mode == HintMode::Top1 ? 1 : cfg.k_intents);
        break;
    }
    const Observation obs{ctx.task, ctx.step_index, ctx.candidate_view, std::nullopt};
    const auto req = build_policy_prompt(obs, ctx.action_history, result.intents, cfg);
    const auto resp = backend.complete(req);
    if (resp.completions.empty()) throw BackendError("backend returned no completions");
    const std::size_t shown = std::min(ctx.candidate_view.size(), cfg.view_size);
    result.action = parse_action_response(resp.completions.front(), std::span(ctx.candidate_view).first(shown));
  } catch (const AuthError&) {
    throw;
  } catch (const UnparseableAction& e) {
    result.error = std::string("unparseable action: ") + e.what();
  } catch (const UnknownElement& e) {
    result.error = std::string("unknown element: ") + e.what();
  } catch (const Error& e) {
    result.error = e.what();
  }
  return result;
}

StepOutcome score_step(const Step& gt, ActResult result) {
  StepOutcome o;
  o.predicted = std::move(result.action);
  o.gt = gt;
  o.intents_shown = std::move(result.intents);
  o.error = std::move(result.error);
  eval::score(o);
  return o;
}

std::vector<StepOutcome> run_offline_task(const AnnotatedTrajectory& trajectory, const ActFn& act_fn,
                                          const PolicyConfig& cfg) {
  std::vector<StepOutcome> outcomes;
  outcomes.reserve(trajectory.steps.size());
  std::vector<Intent> predicted_history;
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    PredictionContext ctx = context_for_step(trajectory, i, cfg.view_size);
    if (cfg.intent_history == IntentHistory::PredictedTop1) ctx.intent_history = predicted_history;
    ActResult r = [&] {
      try {
        return act_fn(ctx, trajectory.steps[i]);
      } catch (const AuthError&) {
        throw;
      } catch (const Error& e) {
        return ActResult{std::nullopt, {}, e.what()};
      }
    }();
    predicted_history.push_back(r.intents.empty() ? trajectory.steps[i].intent : r.intents.front().intent);
    outcomes.push_back(score_step(trajectory.steps[i].step, std::move(r)));
  }
  return outcomes;
}

ActFn make_act_fn(const IntentPredictor* predictor, llm::ChatBackend& backend, const PolicyConfig& cfg) {
  return [predictor, &backend, cfg](const PredictionContext& ctx, const AnnotatedStep& step) {
    return act(ctx, predictor, backend, cfg, step.intent);
  };
}

}  // namespace autointent::policy
