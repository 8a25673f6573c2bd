#include "recallm/provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "recallm/error.hpp"

namespace recallm {

using nlohmann::json;

ChatRequest ChatRequest::user(std::string content, std::string system) {
  ChatRequest request;
  request.system = std::move(system);
  request.messages.push_back(ChatMessage{"user", std::move(content)});
  return request;
}

std::string ChatRequest::full_text() const {
  std::string text = system;
  for (const auto& m : messages) {
    if (!text.empty()) text.push_back('\n');
    text += m.content;
  }
  return text;
}

std::string ChatRequest::tail() const {
  if (messages.empty()) return {};
  std::string_view content = messages.back().content;
  while (!content.empty() && (content.back() == '\n' || content.back() == '\r')) content.remove_suffix(1);
  auto nl = content.rfind('\n');
  return std::string(nl == std::string_view::npos ? content : content.substr(nl + 1));
}

ScriptedProvider::ScriptedProvider(std::string default_response)
    : default_([response = std::move(default_response)](const ChatRequest&) { return response; }) {}

ScriptedProvider::ScriptedProvider(Responder default_responder) : default_(std::move(default_responder)) {}

ScriptedProvider& ScriptedProvider::on(std::string matcher, std::string response) {
  return on(std::move(matcher), [response = std::move(response)](const ChatRequest&) { return response; });
}

ScriptedProvider& ScriptedProvider::on(std::string matcher, Responder responder) {
  script_.push_back(Entry{std::move(matcher), std::move(responder)});
  return *this;
}

std::string ScriptedProvider::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mutex_);
    history_.push_back(request);
  }
  const std::string text = request.full_text();
  for (const auto& entry : script_) {
    if (text.find(entry.matcher) != std::string::npos) return entry.responder(request);
  }
  return default_(request);
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mutex_);
  return history_.size();
}

std::vector<ChatRequest> ScriptedProvider::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

ScriptedProvider::Responder ScriptedProvider::echo_tail() {
  return [](const ChatRequest& request) { return request.tail(); };
}

ScriptedProvider::Responder ScriptedProvider::failing(std::string message) {
  return [message = std::move(message)](const ChatRequest&) -> std::string { throw ProviderError(message); };
}

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig config;
  if (const char* v = std::getenv("RECALL_API_BASE"); v && *v) config.base_url = v;
  if (const char* v = std::getenv("RECALL_API_KEY"); v && *v) config.api_key = v;
  if (const char* v = std::getenv("RECALL_MODEL"); v && *v) config.model = v;
  return config;
}

std::string encode_chat_request(const ChatRequest& request, std::string_view model) {
  if (request.messages.empty()) throw ArgumentError("chat request has no messages");
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", model},
               {"messages", messages},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens}};
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string decode_chat_response(std::string_view body) {
  try {
    auto doc = json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed chat response: ") + e.what());
  }
}

std::vector<double> decode_embedding_response(std::string_view body) {
  try {
    auto doc = json::parse(body);
    return doc.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what());
  }
}

RemoteProvider::RemoteProvider(RemoteConfig config) : config_(std::move(config)) {
  const std::string& url = config_.base_url;
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ArgumentError("provider base url needs a scheme: " + url);
  auto path = url.find('/', scheme + 3);
  origin_ = url.substr(0, path);
  prefix_ = path == std::string::npos ? "" : url.substr(path);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (config_.max_attempts < 1) throw ArgumentError("max_attempts must be at least 1");
}

std::string RemoteProvider::post(const std::string& path, const std::string& body) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto backoff = config_.initial_backoff;
  std::string last_failure;
  int last_status = 0;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    auto result = client.Post(prefix_ + path, headers, body, "application/json");
    if (result) {
      int status = result->status;
      if (status >= 200 && status < 300) return result->body;
      std::string excerpt = result->body.substr(0, 200);
      if (status < 500) {
        throw ProviderError("provider returned " + std::to_string(status) + ": " + excerpt, status, false);
      }
      last_status = status;
      last_failure = "status " + std::to_string(status) + ": " + excerpt;
    } else {
      last_failure = httplib::to_string(result.error());
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw ProviderTimeout("provider failed after " + std::to_string(config_.max_attempts) +
                            " attempts (" + last_failure + ")",
                        last_status);
}

std::string RemoteProvider::complete(const ChatRequest& request) {
  return decode_chat_response(post(config_.chat_path, encode_chat_request(request, config_.model)));
}

std::vector<double> RemoteProvider::embed(std::string_view text) {
  if (text.empty()) throw ArgumentError("cannot embed empty text");
  json body = {{"model", config_.embedding_model}, {"input", std::string(text)}};
  auto vector = decode_embedding_response(
      post(config_.embeddings_path, body.dump(-1, ' ', false, json::error_handler_t::replace)));
  if (config_.embedding_dimension && vector.size() != *config_.embedding_dimension) {
    throw ProviderError("embedding dimension " + std::to_string(vector.size()) + " does not match configured " +
                        std::to_string(*config_.embedding_dimension));
  }
  return vector;
}

}  // namespace recallm
