#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "autointent/llm/chat.hpp"

namespace autointent::llm {

struct ScriptMatcher {
  enum class Kind { Substring, Fingerprint };
  Kind kind = Kind::Substring;
  std::string pattern;

  bool matches(const std::string& rendered_prompt, const std::string& fingerprint) const;
};

// Replies are consumed in order across repeated matches; once exhausted
// the last reply keeps being served.
struct ScriptEntry {
  ScriptMatcher matcher;
  std::vector<std::string> replies;
};

struct TranscriptRecord {
  std::size_t index = 0;
  std::string fingerprint;
  std::string prompt;
  double temperature = 0.0;
  int n_samples = 1;
  std::vector<std::string> completions;
};

std::string transcript_to_jsonl(const std::vector<TranscriptRecord>& transcript);

/// Append-only, lock-guarded transcript shared by the mock backends.
class Transcript {
 public:
  void append(TranscriptRecord record);
  std::vector<TranscriptRecord> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<TranscriptRecord> records_;
};

// Deterministic mock: the first entry whose matcher fits the rendered
// prompt serves the reply. Each of the n_samples completions consumes one
// reply from that entry.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> entries, std::string id = "scripted");

  ChatResponse complete(const ChatRequest& request) override;
  std::string id() const override { return id_; }

  std::vector<TranscriptRecord> transcript() const { return transcript_.snapshot(); }

 private:
  std::mutex mutex_;
  std::vector<ScriptEntry> entries_;
  std::vector<std::size_t> cursor_;
  std::string id_;
  Transcript transcript_;
};

/// One JSON record per line: {"match": "...", "reply": "..." | [...]} or
/// {"fingerprint": "...", "reply": ...}. Blank lines are skipped.
std::vector<ScriptEntry> load_script(const std::filesystem::path& path);

}  // namespace autointent::llm
