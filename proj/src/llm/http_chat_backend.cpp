#include "autointent/llm/http_chat_backend.hpp"

#include "autointent/errors.hpp"

namespace autointent::llm {

using nlohmann::json;

HttpChatBackend::HttpChatBackend(std::string model, std::shared_ptr<HttpTransport> transport)
    : model_(std::move(model)), transport_(std::move(transport)) {}

json HttpChatBackend::request_body(const std::string& model, const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  return json{{"model", model},
              {"messages", std::move(messages)},
              {"temperature", request.temperature},
              {"n", request.n_samples},
              {"max_tokens", request.max_tokens}};
}

ChatResponse HttpChatBackend::parse_response(const json& body, int n_samples, const std::string& backend_id) {
  ChatResponse out;
  out.backend_id = backend_id;
  if (!body.is_object() || !body.contains("choices") || !body.at("choices").is_array())
    throw BackendError("chat response has no choices array");
  for (const auto& choice : body.at("choices")) {
    if (!choice.contains("message") || !choice.at("message").contains("content") ||
        !choice.at("message").at("content").is_string())
      throw BackendError("chat response choice lacks message.content");
    out.completions.push_back(choice.at("message").at("content").get<std::string>());
  }
  if (static_cast<int>(out.completions.size()) != n_samples) {
    throw BackendError("chat response has " + std::to_string(out.completions.size()) + " completions, expected " +
                       std::to_string(n_samples));
  }
  if (body.contains("usage") && body.at("usage").is_object()) {
    out.usage.prompt_tokens = body.at("usage").value("prompt_tokens", 0LL);
    out.usage.completion_tokens = body.at("usage").value("completion_tokens", 0LL);
  }
  return out;
}

ChatResponse HttpChatBackend::complete(const ChatRequest& request) {
  validate(request);
  return parse_response(transport_->post_json(request_body(model_, request)), request.n_samples, id());
}

}  // namespace autointent::llm
