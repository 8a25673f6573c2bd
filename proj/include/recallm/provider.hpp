#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace recallm {

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string system;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 512;

  static ChatRequest user(std::string content, std::string system = {});

  // System preamble and every message, newline separated.
  std::string full_text() const;
  // Last line of the last message.
  std::string tail() const;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
};

// Deterministic stand-in for a chat model. Entries are tried in order; the
// first whose matcher is a substring of the request text answers, otherwise
// the default responder does.
class ScriptedProvider final : public ChatProvider {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  explicit ScriptedProvider(std::string default_response = {});
  explicit ScriptedProvider(Responder default_responder);

  ScriptedProvider& on(std::string matcher, std::string response);
  ScriptedProvider& on(std::string matcher, Responder responder);

  std::string complete(const ChatRequest& request) override;

  std::size_t calls() const;
  std::vector<ChatRequest> history() const;

  // Replies with the last line of the last message.
  static Responder echo_tail();
  // Throws ProviderError(message) on every call.
  static Responder failing(std::string message);

 private:
  struct Entry {
    std::string matcher;
    Responder responder;
  };

  std::vector<Entry> script_;
  Responder default_;
  mutable std::mutex mutex_;
  std::vector<ChatRequest> history_;
};

struct RemoteConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  std::string embedding_model = "text-embedding-ada-002";
  std::string chat_path = "/chat/completions";
  std::string embeddings_path = "/embeddings";
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
  std::optional<std::size_t> embedding_dimension;

  // RECALL_API_BASE, RECALL_API_KEY and RECALL_MODEL override the defaults.
  static RemoteConfig from_env();
};

// Chat-completions and embeddings client over HTTP(S). 5xx responses and
// transport failures are retried with exponential backoff; 4xx responses
// fail immediately.
class RemoteProvider final : public ChatProvider, public EmbeddingProvider {
 public:
  explicit RemoteProvider(RemoteConfig config);

  std::string complete(const ChatRequest& request) override;
  std::vector<double> embed(std::string_view text) override;

  const RemoteConfig& config() const noexcept { return config_; }

 private:
  std::string post(const std::string& path, const std::string& body);

  RemoteConfig config_;
  std::string origin_;
  std::string prefix_;
};

// Wire format helpers, exposed for tests and the mock server.
std::string encode_chat_request(const ChatRequest& request, std::string_view model);
std::string decode_chat_response(std::string_view body);
std::vector<double> decode_embedding_response(std::string_view body);

}  // namespace recallm
