#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recallm/recall.hpp"
#include "recallm/update.hpp"
#include "recallm/vecstore.hpp"

namespace recallm {

enum class ProviderMode {
  automatic,  // remote when a base url is configured, otherwise offline
  offline,
  remote,
};

enum class EmbedderMode { hashed, remote };

// Every tunable of the engine, CLI and service.
//
// Sources are applied in increasing priority: built-in defaults, the config
// file, environment variables, then command-line flags.
struct AppConfig {
  std::string graph_path = "recallm-graph.json";
  std::string vector_path = "recallm-vectors.json";

  RetrievalConfig retrieval;
  RevisionPolicy revision;
  std::size_t top_k = kDefaultTopK;

  ProviderMode provider_mode = ProviderMode::automatic;
  std::string api_base;  // empty: not configured
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  std::string embedding_model = "text-embedding-ada-002";
  int max_attempts = 3;

  EmbedderMode embedder = EmbedderMode::hashed;
  std::size_t embedding_dimension = 256;

  unsigned bench_repetitions = 25;
  std::vector<unsigned> bench_checkpoints = {1, 5, 10, 15, 20, 25};
  std::size_t bench_raw_budget = 16000;

  std::string host = "127.0.0.1";
  int port = 8088;

  // Sets one key, e.g. set("retrieval.window", "unlimited"). Throws
  // ArgumentError for unknown keys or invalid values.
  void set(std::string_view key, std::string_view value);

  // key = value lines; '#' starts a comment line.
  void apply_file_text(std::string_view text, const std::string& origin = "config");
  void apply_file(const std::string& path);
  // RECALL_API_BASE, RECALL_API_KEY, RECALL_MODEL.
  void apply_env(const std::function<const char*(const char*)>& getenv);
  // "key=value" strings from the command line.
  void apply_overrides(const std::vector<std::string>& assignments);

  bool offline() const;
  RemoteConfig remote() const;
  static const std::vector<std::string>& keys();
  nlohmann::json to_json() const;
};

std::string_view to_string(ProviderMode mode);

}  // namespace recallm
