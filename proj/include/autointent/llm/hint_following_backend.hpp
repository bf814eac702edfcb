#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "autointent/llm/chat.hpp"
#include "autointent/llm/scripted_backend.hpp"

namespace autointent::llm {

// Maps an intent (optionally scoped to tasks containing `task`) to the
// action a cooperative model would take when following that intent.
struct HintMapping {
  std::string task;
  std::string intent;
  std::string action;
};

// Mock acting model for policy prompts. It reads the final user message,
// walks the listed intents in order and answers with the action of the
// first intent that has a mapping whose element is among the rendered
// candidates. Otherwise it clicks the top-ranked candidate.
class HintFollowingBackend final : public ChatBackend {
 public:
  explicit HintFollowingBackend(std::vector<HintMapping> mappings, std::string id = "hint-following");

  ChatResponse complete(const ChatRequest& request) override;
  std::string id() const override { return id_; }

  std::vector<TranscriptRecord> transcript() const { return transcript_.snapshot(); }

  /// Pure decision function used by complete().
  std::string decide(std::string_view prompt) const;

 private:
  std::vector<HintMapping> mappings_;
  std::string id_;
  Transcript transcript_;
};

/// JSON Lines of {"task"?: "...", "intent": "...", "action": "..."}.
std::vector<HintMapping> load_hint_map(const std::filesystem::path& path);

}  // namespace autointent::llm
