#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace autointent::llm {

enum class Role { System, User, Assistant };
std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 64;
  int n_samples = 1;

  /// Last user message, or empty when there is none.
  std::string_view last_user_message() const;
};

/// Throws ConfigError when the request violates its invariants.
void validate(const ChatRequest& request);

struct Usage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct ChatResponse {
  std::vector<std::string> completions;
  Usage usage;
  std::string backend_id;
};

/// Messages rendered as `<|role|>\ncontent\n` blocks; the text mock matchers see.
std::string render_prompt(const ChatRequest& request);

/// Hash of the rendered prompt with whitespace runs collapsed, as 16 hex digits.
std::string prompt_fingerprint(const ChatRequest& request);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// Returns exactly request.n_samples completions or throws BackendError.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
  /// Transient failures retried so far, across all calls.
  virtual std::size_t retry_count() const { return 0; }
};

}  // namespace autointent::llm
