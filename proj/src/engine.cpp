#include "recallm/engine.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "recallm/bench.hpp"
#include "recallm/error.hpp"

namespace recallm {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Write to a sibling temp file, then rename, so a crash never leaves a torn
// snapshot behind.
void write_atomically(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::shared_ptr<Embedder> hashed(const AppConfig& config) {
  return std::make_shared<HashedNgramEmbedder>(config.embedding_dimension);
}

}  // namespace

std::string_view to_string(AskMode mode) {
  switch (mode) {
    case AskMode::graph: return "graph";
    case AskMode::vector: return "vector";
    case AskMode::hybrid: return "hybrid";
    case AskMode::retrieval_only: return "retrieval-only";
  }
  return "graph";
}

AskMode parse_ask_mode(std::string_view name) {
  for (auto m : {AskMode::graph, AskMode::vector, AskMode::hybrid, AskMode::retrieval_only}) {
    if (to_string(m) == name) return m;
  }
  throw ArgumentError("unknown mode '" + std::string(name) + "' (graph, vector, hybrid, retrieval-only)");
}

void to_json(json& j, const MergeReport& r) {
  j = json{{"nodes_created", r.nodes_created},
           {"nodes_merged", r.nodes_merged},
           {"edges_created", r.edges_created},
           {"edges_strengthened", r.edges_strengthened}};
}

void to_json(json& j, const UpdateReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back({{"label", f.label}, {"message", f.message}});
  j = json{{"t", r.t_after}, {"merge", r.merge}, {"revised", r.revised}, {"revision_failures", failures}};
}

void to_json(json& j, const EngineStats& s) {
  j = json{{"counter", s.counter}, {"nodes", s.nodes}, {"edges", s.edges}, {"chunks", s.chunks}};
}

MemoryEngine::MemoryEngine(AppConfig config)
    : config_(std::move(config)), vectors_(std::make_shared<HashedNgramEmbedder>(config_.embedding_dimension)) {
  if (config_.offline()) {
    chat_ = std::make_shared<ScriptedProvider>(extractive_answerer());
  } else {
    remote_ = std::make_shared<RemoteProvider>(config_.remote());
    chat_ = remote_;
  }
  if (config_.embedder == EmbedderMode::remote) {
    if (!remote_) throw ArgumentError("embedder.mode=remote needs a remote provider");
    embedder_ = std::make_shared<RemoteEmbedder>(*remote_);
  } else {
    embedder_ = hashed(config_);
  }
  vectors_ = VectorStore(embedder_);
  if (remote_) reviser_ = std::make_unique<ProviderReviser>(*remote_);
  else reviser_ = std::make_unique<FallbackReviser>();
  load();
}

MemoryEngine::MemoryEngine(AppConfig config, std::shared_ptr<ChatProvider> chat, std::shared_ptr<Embedder> embedder,
                           bool load_snapshots)
    : config_(std::move(config)),
      chat_(std::move(chat)),
      embedder_(embedder ? std::move(embedder) : hashed(config_)),
      reviser_(std::make_unique<FallbackReviser>()),
      vectors_(embedder_) {
  if (load_snapshots) load();
}

UpdateReport MemoryEngine::ingest(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ArgumentError("knowledge update text is empty");
  }
  std::unique_lock lock(mutex_);
  // VectorStore::add is all-or-nothing and is the only step that can fail on
  // valid text, so running it first keeps the two stores in step.
  vectors_.add(text);
  return knowledge_update(graph_, text, config_.revision, *reviser_);
}

std::vector<UpdateReport> MemoryEngine::ingest_text(std::string_view text, bool per_line) {
  std::vector<UpdateReport> reports;
  if (!per_line) {
    reports.push_back(ingest(text));
    return reports;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    reports.push_back(ingest(line));
  }
  return reports;
}

json MemoryEngine::ask(std::string_view question, AskMode mode) const {
  std::shared_lock lock(mutex_);
  json doc;
  switch (mode) {
    case AskMode::retrieval_only:
      doc = answer(graph_, question, nullptr, config_.retrieval);
      break;
    case AskMode::graph:
      doc = answer(graph_, question, chat_.get(), config_.retrieval);
      break;
    case AskMode::vector:
      doc = answer_vec(vectors_, question, chat_.get(), config_.top_k);
      break;
    case AskMode::hybrid:
      doc = hybrid_answer(graph_, &vectors_, question, chat_.get(), config_.retrieval, config_.top_k);
      break;
  }
  doc["mode"] = to_string(mode);
  return doc;
}

EngineStats MemoryEngine::stats() const {
  std::shared_lock lock(mutex_);
  return EngineStats{graph_.counter(), graph_.node_count(), graph_.edge_count(), vectors_.size()};
}

std::string MemoryEngine::export_graph() const {
  std::shared_lock lock(mutex_);
  return graph_.snapshot();
}

void MemoryEngine::save() const {
  std::shared_lock lock(mutex_);
  if (!config_.graph_path.empty()) write_atomically(config_.graph_path, graph_.snapshot());
  if (!config_.vector_path.empty()) write_atomically(config_.vector_path, vectors_.snapshot());
}

void MemoryEngine::load() {
  std::unique_lock lock(mutex_);
  if (!config_.graph_path.empty() && std::filesystem::exists(config_.graph_path)) {
    graph_ = GraphStore::load(read_file(config_.graph_path));
  }
  if (!config_.vector_path.empty() && std::filesystem::exists(config_.vector_path)) {
    vectors_ = VectorStore::load(read_file(config_.vector_path), embedder_);
  }
}

}  // namespace recallm
