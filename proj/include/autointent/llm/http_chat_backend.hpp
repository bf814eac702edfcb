#pragma once

#include <memory>
#include <string>

#include "autointent/llm/chat.hpp"
#include "autointent/llm/http.hpp"

namespace autointent::llm {

// Client for chat-completions style endpoints: request body carries
// model, messages, temperature, n and max_tokens; completions are read
// from choices[].message.content.
class HttpChatBackend final : public ChatBackend {
 public:
  HttpChatBackend(std::string model, std::shared_ptr<HttpTransport> transport);

  ChatResponse complete(const ChatRequest& request) override;
  std::string id() const override { return "http:" + model_; }
  std::size_t retry_count() const override { return transport_->retries(); }

  static nlohmann::json request_body(const std::string& model, const ChatRequest& request);
  /// Throws BackendError when the reply lacks the requested completions.
  static ChatResponse parse_response(const nlohmann::json& body, int n_samples, const std::string& backend_id);

 private:
  std::string model_;
  std::shared_ptr<HttpTransport> transport_;
};

}  // namespace autointent::llm
