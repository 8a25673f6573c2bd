#include "recallm/vecstore.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "recallm/error.hpp"
#include "recallm/extract.hpp"
#include "recallm/recall.hpp"

namespace recallm {

using nlohmann::json;

namespace {

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t joined_length(const std::vector<Sentence>& sentences, std::size_t first, std::size_t last) {
  std::size_t n = 0;
  for (std::size_t i = first; i < last; ++i) n += sentences[i].text.size() + (i > first ? 1 : 0);
  return n;
}

}  // namespace

std::vector<std::string> segment(std::string_view text, std::size_t max_chars) {
  if (max_chars == 0) throw ArgumentError("chunk size must be positive");
  auto sentences = split_sentences(text);
  std::vector<std::string> chunks;
  std::size_t first = 0;
  while (first < sentences.size()) {
    std::size_t last = first + 1;
    while (last < sentences.size() && joined_length(sentences, first, last + 1) <= max_chars) ++last;
    std::string chunk;
    for (std::size_t i = first; i < last; ++i) {
      if (i > first) chunk.push_back(' ');
      chunk += sentences[i].text;
    }
    chunks.push_back(std::move(chunk));
    if (last == sentences.size()) break;
    first = last - first > 1 ? last - 1 : last;
  }
  return chunks;
}

Vector l2_normalize(Vector v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  double norm = std::sqrt(sum);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw EmbeddingError("cannot normalize a zero or non-finite vector");
  for (double& x : v) x /= norm;
  return v;
}

double cosine(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw ArgumentError("cosine of vectors with different dimensions");
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) throw EmbeddingError("cosine with a zero vector");
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ArgumentError("embedding dimension must be positive");
}

std::uint64_t HashedNgramEmbedder::fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Vector HashedNgramEmbedder::embed(std::string_view text) {
  std::string body = trimmed(text);
  if (body.empty()) throw EmbeddingError("cannot embed empty text");
  std::string padded = " ";
  for (unsigned char c : body) padded.push_back(static_cast<char>(std::tolower(c)));
  padded.push_back(' ');
  Vector v(dimension_, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    v[fnv1a64(std::string_view(padded).substr(i, 3)) % dimension_] += 1.0;
  }
  return l2_normalize(std::move(v));
}

Vector RemoteEmbedder::embed(std::string_view text) {
  if (trimmed(text).empty()) throw EmbeddingError("cannot embed empty text");
  Vector v = l2_normalize(provider_.embed(text));
  if (dimension_ == 0) {
    dimension_ = v.size();
  } else if (v.size() != dimension_) {
    throw EmbeddingError("embedding dimension changed from " + std::to_string(dimension_) + " to " +
                         std::to_string(v.size()));
  }
  return v;
}

VectorStore::VectorStore(std::shared_ptr<Embedder> embedder) : embedder_(std::move(embedder)) {
  if (!embedder_) throw ArgumentError("vector store needs an embedder");
}

std::size_t VectorStore::add(std::string_view text) {
  std::vector<Chunk> fresh;
  for (auto& piece : segment(text)) {
    Vector v = embedder_->embed(piece);
    fresh.push_back(Chunk{chunks_.size() + fresh.size(), std::move(piece), std::move(v)});
  }
  for (auto& c : fresh) chunks_.push_back(std::move(c));
  return fresh.size();
}

std::vector<ScoredChunk> VectorStore::query(std::string_view question, std::size_t k) const {
  if (k == 0) throw ArgumentError("k must be at least 1");
  if (chunks_.empty()) return {};
  Vector q = embedder_->embed(question);
  std::vector<ScoredChunk> scored;
  scored.reserve(chunks_.size());
  for (const auto& c : chunks_) scored.push_back(ScoredChunk{&c, cosine(q, c.vector)});
  auto better = [](const ScoredChunk& x, const ScoredChunk& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.chunk->ordinal < y.chunk->ordinal;
  };
  std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

std::string VectorStore::snapshot() const {
  json doc = json::array();
  for (const auto& c : chunks_) doc.push_back({{"ordinal", c.ordinal}, {"text", c.text}, {"vector", c.vector}});
  return doc.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

VectorStore VectorStore::load(std::string_view document, std::shared_ptr<Embedder> embedder) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("vector snapshot: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) throw Error("vector snapshot must be a JSON array");
  VectorStore store(std::move(embedder));
  const std::size_t dim = store.embedder_->dimension();
  try {
    for (const auto& item : doc) {
      Chunk c{item.at("ordinal").get<std::uint64_t>(), item.at("text").get<std::string>(),
              item.at("vector").get<Vector>()};
      if (c.ordinal != store.chunks_.size()) throw Error("vector snapshot ordinals must be 0, 1, 2, ...");
      if (dim != 0 && c.vector.size() != dim) {
        throw Error("chunk " + std::to_string(c.ordinal) + " has dimension " + std::to_string(c.vector.size()) +
                    ", embedder expects " + std::to_string(dim));
      }
      double sum = 0.0;
      for (double x : c.vector) sum += x * x;
      if (std::abs(std::sqrt(sum) - 1.0) > 1e-6) {
        throw Error("chunk " + std::to_string(c.ordinal) + " vector is not unit length");
      }
      store.chunks_.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("vector snapshot schema: ") + e.what());
  }
  return store;
}

std::string assemble_vector_prompt(const std::vector<Chunk>& contexts, std::string_view question) {
  std::string prompt;
  for (const auto& c : contexts) {
    if (!prompt.empty()) prompt.push_back(' ');
    prompt += c.text;
  }
  if (!prompt.empty()) prompt += "\n\n";
  prompt += question;
  return prompt;
}

VectorTrace answer_vec(const VectorStore& store, std::string_view question, ChatProvider* provider,
                       std::size_t k) {
  VectorTrace trace;
  trace.question = std::string(question);
  for (const auto& hit : store.query(question, k)) {
    trace.contexts.push_back(*hit.chunk);
    trace.scores.push_back(hit.score);
  }
  trace.assembled_context = assemble_vector_prompt(trace.contexts, question);
  if (!provider) return trace;
  try {
    trace.answer = trimmed(provider->complete(
        ChatRequest::user(trace.assembled_context, trimmed(answer_system_prompt()))));
  } catch (const std::exception& e) {
    trace.error = e.what();
  }
  return trace;
}

void to_json(json& j, const VectorTrace& trace) {
  json contexts = json::array();
  for (std::size_t i = 0; i < trace.contexts.size(); ++i) {
    contexts.push_back({{"ordinal", trace.contexts[i].ordinal},
                        {"text", trace.contexts[i].text},
                        {"score", trace.scores[i]}});
  }
  j = json{{"question", trace.question},
           {"contexts", contexts},
           {"assembled_context", trace.assembled_context},
           {"answer", trace.answer ? json(*trace.answer) : json(nullptr)},
           {"error", trace.error ? json(*trace.error) : json(nullptr)}};
}

}  // namespace recallm
