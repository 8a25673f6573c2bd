#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recallm/provider.hpp"

namespace recallm {

inline constexpr std::size_t kMaxChunkChars = 400;

// Greedy sentence packing into chunks of at most max_chars, each chunk
// repeating the last sentence of the previous one. A sentence longer than
// max_chars becomes its own chunk and is not repeated.
std::vector<std::string> segment(std::string_view text, std::size_t max_chars = kMaxChunkChars);

using Vector = std::vector<double>;

// Scales v to unit length. Throws EmbeddingError for a zero or non-finite
// vector.
Vector l2_normalize(Vector v);
double cosine(const Vector& x, const Vector& y);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // Unit-length embedding; throws EmbeddingError when none exists.
  virtual Vector embed(std::string_view text) = 0;
  // 0 when the dimension is only known after the first call.
  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;
};

// Offline embedder: the lowercased, trimmed text padded with one space on each
// side is cut into byte 3-grams; each 3-gram adds 1 to bucket
// fnv1a64(gram) % dimension.
class HashedNgramEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDimension = 256;

  explicit HashedNgramEmbedder(std::size_t dimension = kDefaultDimension);
  Vector embed(std::string_view text) override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "hashed-ngram"; }

  static std::uint64_t fnv1a64(std::string_view bytes);

 private:
  std::size_t dimension_;
};

// Provider-backed embedder; vectors are normalized here.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbeddingProvider& provider, std::size_t dimension = 0)
      : provider_(provider), dimension_(dimension) {}
  Vector embed(std::string_view text) override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "remote"; }

 private:
  EmbeddingProvider& provider_;
  std::size_t dimension_;
};

struct Chunk {
  std::uint64_t ordinal = 0;
  std::string text;
  Vector vector;

  bool operator==(const Chunk&) const = default;
};

struct ScoredChunk {
  const Chunk* chunk = nullptr;
  double score = 0.0;
};

// Exact cosine search over every stored chunk.
//
// Not internally synchronized; same single-writer, multi-reader contract as
// GraphStore.
class VectorStore {
 public:
  explicit VectorStore(std::shared_ptr<Embedder> embedder);

  // Segments, embeds and appends. Returns the number of chunks added.
  std::size_t add(std::string_view text);
  // Top-k by cosine, descending; ties go to the lower ordinal. k >= 1.
  std::vector<ScoredChunk> query(std::string_view question, std::size_t k) const;

  std::size_t size() const noexcept { return chunks_.size(); }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  Embedder& embedder() const noexcept { return *embedder_; }

  // JSON array of {ordinal, text, vector}.
  std::string snapshot() const;
  static VectorStore load(std::string_view document, std::shared_ptr<Embedder> embedder);

 private:
  std::shared_ptr<Embedder> embedder_;
  std::vector<Chunk> chunks_;
};

struct VectorTrace {
  std::string question;
  std::vector<Chunk> contexts;
  std::vector<double> scores;
  std::string assembled_context;  // the complete prompt text
  std::optional<std::string> answer;
  std::optional<std::string> error;
};

inline constexpr std::size_t kDefaultTopK = 5;

// contexts joined by single spaces, blank line, question; the question alone
// when nothing was retrieved. No chronological prefix.
std::string assemble_vector_prompt(const std::vector<Chunk>& contexts, std::string_view question);

// Baseline question answering. A null provider is retrieval-only mode.
VectorTrace answer_vec(const VectorStore& store, std::string_view question, ChatProvider* provider,
                       std::size_t k = kDefaultTopK);

void to_json(nlohmann::json& j, const VectorTrace& trace);

}  // namespace recallm
