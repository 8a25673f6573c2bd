#include "recallm/update.hpp"

#include <algorithm>

#include "recallm/assets.hpp"
#include "recallm/error.hpp"

namespace recallm {

bool RevisionPolicy::due(const ConceptNode& node) const {
  if (node.context.size() > max_context_chars) return true;
  if (merges_per_revision == 0) return false;
  std::uint64_t credited = node.revisions_done * merges_per_revision;
  return node.merge_count >= credited && node.merge_count - credited >= merges_per_revision;
}

std::string FallbackReviser::revise(std::string_view context) {
  auto sentences = split_sentences(context);
  std::size_t first = sentences.size() > keep_ ? sentences.size() - keep_ : 0;
  std::string out;
  for (std::size_t i = first; i < sentences.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += sentences[i].text;
  }
  return out;
}

ProviderReviser::ProviderReviser(ChatProvider& provider)
    : ProviderReviser(provider, std::string(asset("prompts/revision.txt"))) {}

ProviderReviser::ProviderReviser(ChatProvider& provider, std::string prompt_template)
    : provider_(provider), template_(std::move(prompt_template)) {
  if (template_.find("{context}") == std::string::npos) {
    throw ArgumentError("revision template has no {context} placeholder");
  }
}

std::string ProviderReviser::revise(std::string_view context) {
  std::string reply = provider_.complete(ChatRequest::user(render_revision_prompt(context, template_)));
  auto b = reply.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) throw ProviderError("reviser returned an empty context");
  auto e = reply.find_last_not_of(" \t\r\n");
  return reply.substr(b, e - b + 1);
}

std::string render_revision_prompt(std::string_view context, std::string_view prompt_template) {
  std::string out(prompt_template);
  const std::string_view placeholder = "{context}";
  for (auto pos = out.find(placeholder); pos != std::string::npos;
       pos = out.find(placeholder, pos + context.size())) {
    out.replace(pos, placeholder.size(), context);
  }
  return out;
}

std::string revise_context(const ConceptNode& node, Reviser& reviser) {
  if (node.context.empty()) throw ArgumentError("concept '" + node.label + "' has no context to revise");
  return reviser.revise(node.context);
}

UpdateReport knowledge_update(GraphStore& store, std::string_view text, const RevisionPolicy& policy,
                              Reviser& reviser, const NounTagger& tagger) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ArgumentError("knowledge update text is empty");
  }
  ConceptBatch batch = extract_concepts(text, tagger);

  UpdateReport report;
  report.t_after = store.advance();
  report.merge = store.merge_batch(batch);

  if (!policy.enabled) return report;
  for (const auto& [label, entry] : batch.concepts) {
    const ConceptNode* node = store.find(label);
    if (!node || !policy.due(*node)) continue;
    try {
      std::string revised = revise_context(*node, reviser);
      store.apply_revision(label, std::move(revised));
      report.revised.push_back(label);
    } catch (const std::exception& e) {
      report.failures.push_back(RevisionFailure{label, e.what()});
    }
  }
  return report;
}

}  // namespace recallm
