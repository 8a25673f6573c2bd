#include "recallm/recall.hpp"

#include <algorithm>
#include <map>

#include "recallm/assets.hpp"
#include "recallm/error.hpp"

namespace recallm {
namespace {

using nlohmann::json;

Timestep relation_time(const PromptEntry& e) { return e.relation ? e.relation->temporal_index : 0; }

bool ranks_before(const PromptEntry& x, const PromptEntry& y) {
  if (x.score != y.score) return x.score > y.score;
  if (relation_time(x) != relation_time(y)) return relation_time(x) > relation_time(y);
  return x.label < y.label;
}

std::string trimmed(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> essential_labels(std::string_view question, const NounTagger& tagger) {
  return concept_labels(question, tagger);
}

std::vector<PromptEntry> candidate_pool(const GraphStore& store, std::span<const std::string> essentials,
                                        const RetrievalConfig& cfg) {
  const NeighborQuery query = cfg.neighbor_query();
  std::map<std::string, PromptEntry> best;
  for (const auto& label : essentials) {
    for (const auto& n : store.neighbors(label, query)) {
      PromptEntry entry{n.node->label, n.node->context, false, *n.relation,
                        relation_score(*n.relation, cfg.alpha), n.distance};
      auto [it, fresh] = best.try_emplace(entry.label, entry);
      if (!fresh && ranks_before(entry, it->second)) it->second = std::move(entry);
    }
  }
  std::vector<PromptEntry> pool;
  for (auto& [label, entry] : best) {
    if (std::find(essentials.begin(), essentials.end(), label) != essentials.end() && store.find(label)) continue;
    pool.push_back(std::move(entry));
  }
  std::sort(pool.begin(), pool.end(), ranks_before);
  return pool;
}

std::vector<PromptEntry> build_prompt_set(const GraphStore& store, std::span<const std::string> essentials,
                                          const RetrievalConfig& cfg) {
  if (cfg.max_distance < 1) throw ArgumentError("max_distance must be at least 1");
  std::vector<PromptEntry> set;
  auto contains = [&set](const std::string& label) {
    return std::any_of(set.begin(), set.end(), [&](const PromptEntry& e) { return e.label == label; });
  };
  for (const auto& label : essentials) {
    if (set.size() >= cfg.max_prompt_concepts) return set;
    const ConceptNode* node = store.find(label);
    if (!node || contains(label)) continue;
    set.push_back(PromptEntry{node->label, node->context, true, std::nullopt, 0.0, 0});
  }
  for (auto& entry : candidate_pool(store, essentials, cfg)) {
    if (set.size() >= cfg.max_prompt_concepts) break;
    if (!contains(entry.label)) set.push_back(std::move(entry));
  }
  return set;
}

std::string assemble_prompt(std::span<const PromptEntry> prompt_set, std::string_view question) {
  std::string prompt(kChronologyPrefix);
  prompt += "\n\n";
  bool first = true;
  for (const auto& entry : prompt_set) {
    if (entry.context.empty()) continue;
    if (!first) prompt.push_back(' ');
    prompt += entry.context;
    first = false;
  }
  if (!first) prompt += "\n\n";
  prompt += question;
  return prompt;
}

std::string_view answer_system_prompt() { return asset("prompts/answer_system.txt"); }

RetrievalTrace answer(const GraphStore& store, std::string_view question, ChatProvider* provider,
                      const RetrievalConfig& cfg, const NounTagger& tagger) {
  RetrievalTrace trace;
  trace.question = std::string(question);
  trace.essentials_requested = essential_labels(question, tagger);
  for (const auto& label : trace.essentials_requested) {
    if (store.find(label)) trace.essentials_found.push_back(label);
  }
  trace.prompt_set = build_prompt_set(store, trace.essentials_requested, cfg);
  trace.assembled_context = assemble_prompt(trace.prompt_set, question);
  if (!provider) return trace;
  try {
    trace.answer = trimmed(provider->complete(
        ChatRequest::user(trace.assembled_context, trimmed(std::string(answer_system_prompt())))));
  } catch (const std::exception& e) {
    trace.error = e.what();
  }
  return trace;
}

void to_json(json& j, const RetrievalConfig& cfg) {
  j = json{{"max_prompt_concepts", cfg.max_prompt_concepts},
           {"max_distance", cfg.max_distance},
           {"alpha", cfg.alpha},
           {"temporal_window", cfg.temporal_window ? json(*cfg.temporal_window) : json(nullptr)}};
}

void to_json(json& j, const PromptEntry& entry) {
  j = json{{"label", entry.label}, {"essential", entry.essential}, {"score", entry.score},
           {"distance", entry.distance}};
  if (entry.relation) {
    j["relation"] = {{"a", entry.relation->endpoints.a},
                     {"b", entry.relation->endpoints.b},
                     {"strength", entry.relation->strength},
                     {"t", entry.relation->temporal_index}};
  } else {
    j["relation"] = nullptr;
  }
}

void to_json(json& j, const RetrievalTrace& trace) {
  j = json{{"question", trace.question},
           {"essentials_requested", trace.essentials_requested},
           {"essentials_found", trace.essentials_found},
           {"prompt_set", trace.prompt_set},
           {"assembled_context", trace.assembled_context},
           {"answer", trace.answer ? json(*trace.answer) : json(nullptr)},
           {"error", trace.error ? json(*trace.error) : json(nullptr)}};
}

}  // namespace recallm
