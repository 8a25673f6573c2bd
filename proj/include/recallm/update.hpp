#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "recallm/extract.hpp"
#include "recallm/kgraph.hpp"
#include "recallm/provider.hpp"

namespace recallm {

struct RevisionPolicy {
  std::uint64_t merges_per_revision = 5;
  std::size_t max_context_chars = 2000;
  bool enabled = true;

  // merge_count - revisions_done * merges_per_revision >= merges_per_revision,
  // or the context is longer than max_context_chars.
  bool due(const ConceptNode& node) const;
};

// Produces a shorter context that keeps the most recent truths.
class Reviser {
 public:
  virtual ~Reviser() = default;
  virtual std::string revise(std::string_view context) = 0;
};

// Offline reviser: keeps the last `keep` sentences in order.
class FallbackReviser final : public Reviser {
 public:
  explicit FallbackReviser(std::size_t keep = 10) : keep_(keep) {}
  std::string revise(std::string_view context) override;

 private:
  std::size_t keep_;
};

// One-shot summarization through a chat model. The template must contain the
// placeholder {context}.
class ProviderReviser final : public Reviser {
 public:
  explicit ProviderReviser(ChatProvider& provider);
  ProviderReviser(ChatProvider& provider, std::string prompt_template);
  std::string revise(std::string_view context) override;

 private:
  ChatProvider& provider_;
  std::string template_;
};

std::string render_revision_prompt(std::string_view context, std::string_view prompt_template);

// Revised context for node. Provider errors propagate.
std::string revise_context(const ConceptNode& node, Reviser& reviser);

struct RevisionFailure {
  std::string label;
  std::string message;

  bool operator==(const RevisionFailure&) const = default;
};

struct UpdateReport {
  Timestep t_after = 0;
  MergeReport merge;
  std::vector<std::string> revised;
  std::vector<RevisionFailure> failures;
};

// One knowledge update: t <- t + 1, extract, merge, then revise touched
// concepts whose revision is due. A failed revision keeps the node's
// merged context and is reported instead of thrown.
UpdateReport knowledge_update(GraphStore& store, std::string_view text, const RevisionPolicy& policy,
                              Reviser& reviser, const NounTagger& tagger = RuleTagger::bundled());

}  // namespace recallm
