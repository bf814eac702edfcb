#include "autointent/llm/scripted_backend.hpp"

#include <json.hpp>

#include "autointent/errors.hpp"
#include "autointent/text.hpp"
#include "autointent/trajectory_io.hpp"

namespace autointent::llm {

using nlohmann::json;

bool ScriptMatcher::matches(const std::string& rendered_prompt, const std::string& fingerprint) const {
  switch (kind) {
    case Kind::Substring: return rendered_prompt.find(pattern) != std::string::npos;
    case Kind::Fingerprint: return fingerprint == pattern;
  }
  return false;
}

std::string transcript_to_jsonl(const std::vector<TranscriptRecord>& transcript) {
  std::string out;
  for (const auto& r : transcript) {
    json j{{"index", r.index},     {"fingerprint", r.fingerprint}, {"prompt", r.prompt},
           {"temperature", r.temperature}, {"n", r.n_samples},     {"completions", r.completions}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

void Transcript::append(TranscriptRecord record) {
  std::lock_guard lock(mutex_);
  record.index = records_.size();
  records_.push_back(std::move(record));
}

std::vector<TranscriptRecord> Transcript::snapshot() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> entries, std::string id)
    : entries_(std::move(entries)), cursor_(entries_.size(), 0), id_(std::move(id)) {
  for (const auto& e : entries_) {
    if (e.replies.empty()) throw ConfigError("script entry '" + e.matcher.pattern + "' has no replies");
  }
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  validate(request);
  const std::string prompt = render_prompt(request);
  const std::string fp = prompt_fingerprint(request);

  ChatResponse response;
  response.backend_id = id_;
  {
    std::lock_guard lock(mutex_);
    std::size_t hit = entries_.size();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].matcher.matches(prompt, fp)) {
        hit = i;
        break;
      }
    }
    if (hit == entries_.size()) {
      std::string tail = std::string(request.last_user_message());
      if (tail.size() > 160) tail = "..." + tail.substr(tail.size() - 160);
      throw UnscriptedPrompt(fp, tail);
    }
    auto& entry = entries_[hit];
    for (int s = 0; s < request.n_samples; ++s) {
      std::size_t at = std::min(cursor_[hit], entry.replies.size() - 1);
      response.completions.push_back(entry.replies[at]);
      ++cursor_[hit];
    }
  }
  response.usage.prompt_tokens = static_cast<long long>(text::split_whitespace(prompt).size());
  for (const auto& c : response.completions)
    response.usage.completion_tokens += static_cast<long long>(text::split_whitespace(c).size());

  transcript_.append(TranscriptRecord{0, fp, prompt, request.temperature, request.n_samples, response.completions});
  return response;
}

std::vector<ScriptEntry> load_script(const std::filesystem::path& path) {
  std::vector<ScriptEntry> entries;
  io::for_each_record(path, [&](const json& j, std::size_t line) {
    ScriptEntry e;
    if (j.contains("match")) {
      e.matcher = {ScriptMatcher::Kind::Substring, io::require_string(j, "match", line, "")};
    } else if (j.contains("fingerprint")) {
      e.matcher = {ScriptMatcher::Kind::Fingerprint, io::require_string(j, "fingerprint", line, "")};
    } else {
      throw SchemaError(line, "match", "missing field (or fingerprint)");
    }
    const json& reply = io::require(j, "reply", line, "");
    if (reply.is_string()) {
      e.replies.push_back(reply.get<std::string>());
    } else if (reply.is_array() && !reply.empty()) {
      for (const auto& r : reply) {
        if (!r.is_string()) throw SchemaError(line, "reply", "expected strings");
        e.replies.push_back(r.get<std::string>());
      }
    } else {
      throw SchemaError(line, "reply", "expected a string or non-empty array");
    }
    entries.push_back(std::move(e));
  });
  return entries;
}

}  // namespace autointent::llm
