#include "recallm/hybrid.hpp"

#include <algorithm>
#include <cctype>
#include <future>

#include "recallm/assets.hpp"
#include "recallm/error.hpp"

namespace recallm {

using nlohmann::json;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void replace_all(std::string& text, std::string_view placeholder, std::string_view value) {
  for (auto pos = text.find(placeholder); pos != std::string::npos;
       pos = text.find(placeholder, pos + value.size())) {
    text.replace(pos, placeholder.size(), value);
  }
}

bool has_answer(const auto& trace) { return trace.answer.has_value() && !trace.error.has_value(); }

}  // namespace

std::string_view to_string(Choice c) { return c == Choice::graph ? "graph" : "vector"; }

std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::discriminator: return "discriminator";
    case Basis::heuristic: return "heuristic";
    case Basis::fallback: return "fallback";
    case Basis::none: return "none";
  }
  return "none";
}

const std::vector<std::string>& uncertainty_phrases() {
  static const std::vector<std::string> phrases = {
      "not having enough information",
      "conflicting information",
      "cannot",
      "don't know",
      "no information",
      // Common phrasings of the same non-answer.
      "not have enough information",
      "do not know",
      "unable to",
  };
  return phrases;
}

std::size_t uncertainty_score(std::string_view answer) {
  std::string text = lowercase(answer);
  replace_all(text, "\xe2\x80\x99", "'");  // U+2019 right single quotation mark
  std::size_t hits = 0;
  for (const auto& phrase : uncertainty_phrases()) {
    for (auto pos = text.find(phrase); pos != std::string::npos; pos = text.find(phrase, pos + phrase.size())) {
      ++hits;
    }
  }
  return hits;
}

Choice heuristic_choice(std::string_view answer_a, std::string_view answer_b) {
  return uncertainty_score(answer_b) < uncertainty_score(answer_a) ? Choice::vector : Choice::graph;
}

std::string render_discriminator_prompt(std::string_view question, std::string_view answer_a,
                                        std::string_view answer_b) {
  std::string prompt(asset("prompts/discriminator.txt"));
  // The answers may themselves contain braces, so substitute them last.
  replace_all(prompt, "{question}", question);
  auto a = prompt.rfind("{answer_a}");
  if (a != std::string::npos) prompt.replace(a, 10, answer_a);
  auto b = prompt.rfind("{answer_b}");
  if (b != std::string::npos) prompt.replace(b, 10, answer_b);
  return prompt;
}

std::optional<Choice> parse_choice(std::string_view reply) {
  bool saw_a = false, saw_b = false;
  std::string word;
  auto flush = [&] {
    if (word == "A") saw_a = true;
    if (word == "B") saw_b = true;
    word.clear();
  };
  for (char c : reply) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  if (saw_a == saw_b) return std::nullopt;
  return saw_a ? Choice::graph : Choice::vector;
}

Discrimination discriminate(std::string_view question, std::string_view answer_a, std::string_view answer_b,
                            ChatProvider* provider) {
  Discrimination d;
  if (!provider) {
    d.choice = heuristic_choice(answer_a, answer_b);
    return d;
  }
  try {
    std::string reply = provider->complete(ChatRequest::user(render_discriminator_prompt(question, answer_a, answer_b)));
    if (auto choice = parse_choice(reply)) {
      d.choice = *choice;
      d.basis = Basis::discriminator;
      return d;
    }
    d.note = "unparseable discriminator reply: " + reply.substr(0, 80);
  } catch (const std::exception& e) {
    d.note = std::string("discriminator failed: ") + e.what();
  }
  d.choice = heuristic_choice(answer_a, answer_b);
  d.basis = Basis::heuristic;
  return d;
}

std::optional<std::string> HybridTrace::answer() const {
  if (!chosen) return std::nullopt;
  if (*chosen == Choice::graph) return graph.answer;
  return vector ? vector->answer : std::nullopt;
}

HybridTrace hybrid_from_traces(std::string_view question, RetrievalTrace graph, std::optional<VectorTrace> vector,
                               ChatProvider* discriminator) {
  HybridTrace trace;
  trace.question = std::string(question);
  trace.graph = std::move(graph);
  trace.vector = std::move(vector);
  bool graph_ok = has_answer(trace.graph);
  bool vector_ok = trace.vector && has_answer(*trace.vector);
  if (graph_ok && vector_ok) {
    Discrimination d = discriminate(question, *trace.graph.answer, *trace.vector->answer, discriminator);
    trace.chosen = d.choice;
    trace.basis = d.basis;
    trace.note = std::move(d.note);
  } else if (graph_ok || vector_ok) {
    trace.chosen = graph_ok ? Choice::graph : Choice::vector;
    trace.basis = Basis::fallback;
  }
  return trace;
}

HybridTrace hybrid_answer(const GraphStore& graph, const VectorStore* vec, std::string_view question,
                          ChatProvider* provider, const RetrievalConfig& cfg, std::size_t k,
                          const NounTagger& tagger) {
  std::future<VectorTrace> vector_side;
  if (vec) {
    vector_side = std::async(std::launch::async, [vec, q = std::string(question), provider, k] {
      try {
        return answer_vec(*vec, q, provider, k);
      } catch (const std::exception& e) {
        VectorTrace failed;
        failed.question = q;
        failed.error = e.what();
        return failed;
      }
    });
  }
  RetrievalTrace graph_trace = answer(graph, question, provider, cfg, tagger);
  std::optional<VectorTrace> vector_trace;
  if (vec) vector_trace = vector_side.get();
  return hybrid_from_traces(question, std::move(graph_trace), std::move(vector_trace), provider);
}

double perfect_discriminator_accuracy(std::span<const int> graph, std::span<const int> vector, int max_score) {
  if (max_score < 1) throw ArgumentError("max_score must be positive");
  if (graph.size() != vector.size()) throw ArgumentError("grade tables cover different question sets");
  if (graph.empty()) throw ArgumentError("grade tables are empty");
  long total = 0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph[i] < 0 || graph[i] > max_score || vector[i] < 0 || vector[i] > max_score) {
      throw ArgumentError("grade out of range at question " + std::to_string(i));
    }
    total += std::max(graph[i], vector[i]);
  }
  return static_cast<double>(total) / (static_cast<double>(graph.size()) * max_score);
}

double perfect_discriminator_accuracy(const std::map<std::string, int>& graph,
                                      const std::map<std::string, int>& vector, int max_score) {
  std::vector<int> g, v;
  for (const auto& [id, score] : graph) {
    auto it = vector.find(id);
    if (it == vector.end()) throw ArgumentError("question '" + id + "' has no vector grade");
    g.push_back(score);
    v.push_back(it->second);
  }
  if (graph.size() != vector.size()) throw ArgumentError("grade tables cover different question sets");
  return perfect_discriminator_accuracy(g, v, max_score);
}

void to_json(json& j, const HybridTrace& trace) {
  auto answer = trace.answer();
  j = json{{"question", trace.question},
           {"graph", trace.graph},
           {"vector", trace.vector ? json(*trace.vector) : json(nullptr)},
           {"chosen", trace.chosen ? json(to_string(*trace.chosen)) : json(nullptr)},
           {"basis", to_string(trace.basis)},
           {"note", trace.note ? json(*trace.note) : json(nullptr)},
           {"answer", answer ? json(*answer) : json(nullptr)}};
}

}  // namespace recallm
