#include "autointent/llm/hint_following_backend.hpp"

#include <regex>

#include <json.hpp>

#include "autointent/errors.hpp"
#include "autointent/intent.hpp"
#include "autointent/prompt_format.hpp"
#include "autointent/text.hpp"
#include "autointent/trajectory_io.hpp"

namespace autointent::llm {

namespace {

const std::regex& candidate_line() {
  static const std::regex re(R"(^\((\d+)\) <([A-Za-z0-9_-]+) id=([^\s/>]+))");
  return re;
}

const std::regex& element_ref() {
  static const std::regex re(R"(<([A-Za-z0-9_-]+) id=([^\s/>]+))");
  return re;
}

const std::regex& numbered_line() {
  static const std::regex re(R"(^\d+\.\s+(.*)$)");
  return re;
}

struct ParsedPolicyPrompt {
  std::string task;
  std::vector<std::pair<std::string, std::string>> candidates;  // (tag, id)
  std::vector<std::string> intents;
};

ParsedPolicyPrompt parse_policy_prompt(std::string_view prompt) {
  ParsedPolicyPrompt p;
  bool in_intents = false;
  for (const auto& raw : text::split_lines(prompt)) {
    std::string_view line = text::trim(raw);
    if (line.starts_with(prompt_format::kTask)) {
      p.task = std::string(line.substr(prompt_format::kTask.size()));
      in_intents = false;
      continue;
    }
    if (line.starts_with(prompt_format::kNextIntents)) {
      in_intents = true;
      continue;
    }
    std::string s(line);
    std::smatch m;
    if (in_intents) {
      if (std::regex_match(s, m, numbered_line())) {
        p.intents.emplace_back(text::trim(m[1].str()));
        continue;
      }
      in_intents = false;
    }
    if (std::regex_search(s, m, candidate_line())) p.candidates.emplace_back(m[2].str(), m[3].str());
  }
  return p;
}

std::string canonical(std::string_view s) {
  try {
    return normalize_intent(s).intent.text();
  } catch (const EmptyIntent&) {
    return {};
  }
}

}  // namespace

HintFollowingBackend::HintFollowingBackend(std::vector<HintMapping> mappings, std::string id)
    : mappings_(std::move(mappings)), id_(std::move(id)) {
  for (auto& m : mappings_) m.intent = canonical(m.intent);
}

std::string HintFollowingBackend::decide(std::string_view prompt) const {
  ParsedPolicyPrompt p = parse_policy_prompt(prompt);
  for (const auto& listed : p.intents) {
    const std::string key = canonical(listed);
    for (const auto& m : mappings_) {
      if (m.intent != key) continue;
      if (!m.task.empty() && p.task.find(m.task) == std::string::npos) continue;
      std::smatch ref;
      if (!std::regex_search(m.action, ref, element_ref())) continue;
      const std::string id = ref[2].str();
      for (const auto& [tag, cid] : p.candidates) {
        if (cid == id) return m.action;
      }
    }
  }
  if (p.candidates.empty()) return "no candidates";
  return "CLICK <" + p.candidates.front().first + " id=" + p.candidates.front().second + " />";
}

ChatResponse HintFollowingBackend::complete(const ChatRequest& request) {
  validate(request);
  ChatResponse response;
  response.backend_id = id_;
  const std::string answer = decide(request.last_user_message());
  response.completions.assign(static_cast<std::size_t>(request.n_samples), answer);
  transcript_.append(TranscriptRecord{0, prompt_fingerprint(request), render_prompt(request), request.temperature,
                                      request.n_samples, response.completions});
  return response;
}

std::vector<HintMapping> load_hint_map(const std::filesystem::path& path) {
  std::vector<HintMapping> out;
  io::for_each_record(path, [&](const nlohmann::json& j, std::size_t line) {
    HintMapping m;
    m.task = j.contains("task") ? io::require_string(j, "task", line, "") : std::string();
    m.intent = io::require_string(j, "intent", line, "");
    m.action = io::require_string(j, "action", line, "");
    out.push_back(std::move(m));
  });
  return out;
}

}  // namespace autointent::llm
