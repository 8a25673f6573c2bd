#pragma once

#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recallm/config.hpp"
#include "recallm/hybrid.hpp"
#include "recallm/update.hpp"

namespace recallm {

enum class AskMode { graph, vector, hybrid, retrieval_only };

std::string_view to_string(AskMode mode);
AskMode parse_ask_mode(std::string_view name);

void to_json(nlohmann::json& j, const MergeReport& report);
void to_json(nlohmann::json& j, const UpdateReport& report);

struct EngineStats {
  Timestep counter = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t chunks = 0;
};
void to_json(nlohmann::json& j, const EngineStats& stats);

// The graph memory and the vector baseline behind one writer lock. Every
// surface (CLI, REPL, HTTP) goes through this class.
class MemoryEngine {
 public:
  // Builds providers from config; loads snapshots that exist on disk.
  explicit MemoryEngine(AppConfig config);
  // Injected backends, e.g. scripted providers in tests. A null chat provider
  // disables answering; a null embedder uses the hashed embedder.
  MemoryEngine(AppConfig config, std::shared_ptr<ChatProvider> chat, std::shared_ptr<Embedder> embedder,
               bool load_snapshots = false);

  // One knowledge update into both stores.
  UpdateReport ingest(std::string_view text);
  // One update per non-blank line, or one for the whole text.
  std::vector<UpdateReport> ingest_text(std::string_view text, bool per_line);

  // Trace document for the mode; graph-mode traces are RetrievalTrace JSON.
  nlohmann::json ask(std::string_view question, AskMode mode) const;

  EngineStats stats() const;
  std::string export_graph() const;

  // Writes both snapshots to the configured paths; empty paths are skipped.
  void save() const;
  void load();

  const AppConfig& config() const noexcept { return config_; }
  ChatProvider* chat() const noexcept { return chat_.get(); }

 private:
  AppConfig config_;
  std::shared_ptr<ChatProvider> chat_;
  std::shared_ptr<Embedder> embedder_;
  std::shared_ptr<RemoteProvider> remote_;  // backs the remote embedder, if any
  std::unique_ptr<Reviser> reviser_;
  GraphStore graph_;
  VectorStore vectors_;
  mutable std::shared_mutex mutex_;
};

}  // namespace recallm
