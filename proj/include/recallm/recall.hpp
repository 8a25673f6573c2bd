#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recallm/extract.hpp"
#include "recallm/kgraph.hpp"
#include "recallm/provider.hpp"

namespace recallm {

// Prefix placed before the retrieved contexts.
inline constexpr std::string_view kChronologyPrefix =
    "each sentence in the following statements is true when read in chronological order";

struct RetrievalConfig {
  std::size_t max_prompt_concepts = 10;
  unsigned max_distance = 2;
  double alpha = 3.0;
  std::optional<Timestep> temporal_window = 3;  // nullopt: unlimited

  NeighborQuery neighbor_query() const { return NeighborQuery{max_distance, temporal_window, alpha}; }
};

struct PromptEntry {
  std::string label;
  std::string context;
  bool essential = false;
  std::optional<Relation> relation;  // scoring relation; absent for essentials
  double score = 0.0;
  unsigned distance = 0;
};

struct RetrievalTrace {
  std::string question;
  std::vector<std::string> essentials_requested;
  std::vector<std::string> essentials_found;
  std::vector<PromptEntry> prompt_set;
  std::string assembled_context;  // the complete prompt text
  std::optional<std::string> answer;
  std::optional<std::string> error;
};

// Stemmed noun labels of the question in first-occurrence order.
std::vector<std::string> essential_labels(std::string_view question,
                                          const NounTagger& tagger = RuleTagger::bundled());

// Every neighbor of the found essentials, each with its best scoring
// relation, sorted by score descending, then relation recency, then label.
// Essentials themselves are excluded. Not truncated.
std::vector<PromptEntry> candidate_pool(const GraphStore& store, std::span<const std::string> essentials,
                                        const RetrievalConfig& cfg);

// Found essentials in question order, then candidates, capped at
// cfg.max_prompt_concepts.
std::vector<PromptEntry> build_prompt_set(const GraphStore& store, std::span<const std::string> essentials,
                                          const RetrievalConfig& cfg);

// prefix, blank line, contexts joined by single spaces, blank line, question.
std::string assemble_prompt(std::span<const PromptEntry> prompt_set, std::string_view question);

// Full question-answering pass. A null provider is retrieval-only mode: the
// trace is populated and answer stays empty. Provider failures are recorded
// in trace.error.
RetrievalTrace answer(const GraphStore& store, std::string_view question, ChatProvider* provider,
                      const RetrievalConfig& cfg = {}, const NounTagger& tagger = RuleTagger::bundled());

// System preamble sent with every answering request.
std::string_view answer_system_prompt();

void to_json(nlohmann::json& j, const RetrievalConfig& cfg);
void to_json(nlohmann::json& j, const PromptEntry& entry);
void to_json(nlohmann::json& j, const RetrievalTrace& trace);

}  // namespace recallm
