#include "autointent/llm/chat.hpp"

#include "autointent/errors.hpp"
#include "autointent/text.hpp"

namespace autointent::llm {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

std::string_view ChatRequest::last_user_message() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) return it->content;
  }
  return {};
}

void validate(const ChatRequest& request) {
  if (request.messages.empty()) throw ConfigError("chat request has no messages");
  if (request.messages.front().role == Role::Assistant)
    throw ConfigError("chat request must open with a system or user message");
  if (!(request.temperature >= 0.0)) throw ConfigError("chat request temperature must be >= 0");
  if (request.max_tokens <= 0) throw ConfigError("chat request max_tokens must be positive");
  if (request.n_samples <= 0) throw ConfigError("chat request n_samples must be positive");
}

std::string render_prompt(const ChatRequest& request) {
  std::string out;
  for (const auto& m : request.messages) {
    out += "<|";
    out += to_string(m.role);
    out += "|>\n";
    out += m.content;
    out += '\n';
  }
  return out;
}

std::string prompt_fingerprint(const ChatRequest& request) {
  return text::hex64(text::fnv1a64(text::join(text::split_whitespace(render_prompt(request)), " ")));
}

}  // namespace autointent::llm
