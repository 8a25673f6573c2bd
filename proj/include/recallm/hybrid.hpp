#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recallm/recall.hpp"
#include "recallm/vecstore.hpp"

namespace recallm {

enum class Choice { graph, vector };  // A is the graph answer, B the vector answer

enum class Basis {
  discriminator,  // the chat model picked
  heuristic,      // uncertainty-phrase count picked
  fallback,       // only one backend produced an answer
  none,           // neither backend produced an answer
};

std::string_view to_string(Choice c);
std::string_view to_string(Basis b);

// Case-insensitive substrings that signal a non-answer.
const std::vector<std::string>& uncertainty_phrases();

// Number of uncertainty-phrase occurrences in answer.
std::size_t uncertainty_score(std::string_view answer);

struct Discrimination {
  Choice choice = Choice::graph;
  Basis basis = Basis::heuristic;
  std::optional<std::string> note;  // why the heuristic was used instead of the provider
};

// Lower uncertainty score wins; ties go to the graph answer.
Choice heuristic_choice(std::string_view answer_a, std::string_view answer_b);

std::string render_discriminator_prompt(std::string_view question, std::string_view answer_a,
                                        std::string_view answer_b);

// Reads a single A/B verdict. Empty when the reply names neither or both.
std::optional<Choice> parse_choice(std::string_view reply);

// With a provider, asks the 6-shot discriminator; a provider error or an
// unparseable reply falls back to the heuristic and is noted.
Discrimination discriminate(std::string_view question, std::string_view answer_a, std::string_view answer_b,
                            ChatProvider* provider);

struct HybridTrace {
  std::string question;
  RetrievalTrace graph;
  std::optional<VectorTrace> vector;  // absent when the vector backend is disabled
  std::optional<Choice> chosen;
  Basis basis = Basis::none;
  std::optional<std::string> note;

  // The selected answer, if any.
  std::optional<std::string> answer() const;
};

// Join step over two finished traces.
HybridTrace hybrid_from_traces(std::string_view question, RetrievalTrace graph, std::optional<VectorTrace> vector,
                               ChatProvider* discriminator);

// Runs both backends concurrently and joins them. vec may be null to disable
// the vector backend. The provider answers both sides and discriminates.
HybridTrace hybrid_answer(const GraphStore& graph, const VectorStore* vec, std::string_view question,
                          ChatProvider* provider, const RetrievalConfig& cfg = {}, std::size_t k = kDefaultTopK,
                          const NounTagger& tagger = RuleTagger::bundled());

// Sum over questions of max(graph, vector), divided by n * max_score. Returns
// a fraction in [0, 1]. Throws ArgumentError on empty or mismatched inputs or
// out-of-range scores.
double perfect_discriminator_accuracy(std::span<const int> graph, std::span<const int> vector, int max_score = 2);
double perfect_discriminator_accuracy(const std::map<std::string, int>& graph,
                                      const std::map<std::string, int>& vector, int max_score = 2);

void to_json(nlohmann::json& j, const HybridTrace& trace);

}  // namespace recallm
