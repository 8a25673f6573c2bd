#include "recallm/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "recallm/assets.hpp"
#include "recallm/error.hpp"

namespace recallm {

using nlohmann::json;

namespace {

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed for " + path);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

struct Section {
  std::string name;
  std::size_t declared = 0;
  std::size_t found = 0;
};

Question parse_question(const std::string& line, const std::string& section) {
  auto fields = split(line, '\t');
  if (fields.size() != 3) {
    throw DatasetError(section, "question line needs 3 tab-separated fields: " + line);
  }
  Question q{trimmed(fields[0]), trimmed(fields[1]), {}};
  if (q.text.empty() || q.reference.empty()) throw DatasetError(section, "empty question or reference: " + line);
  for (const auto& part : split(fields[2], ',')) {
    auto t = parse_uint(trimmed(part));
    if (!t || *t == 0) throw DatasetError(section, "bad evidence timestep '" + part + "'");
    q.evidence.push_back(*t);
  }
  return q;
}

}  // namespace

// ---------------------------------------------------------------- dataset

const std::string& TemporalDataset::statement_at(Timestep t) const {
  if (t == 0 || t > timesteps()) throw ArgumentError("timestep " + std::to_string(t) + " is outside the dataset");
  return t <= initial.size() ? initial[t - 1] : loop[t - initial.size() - 1];
}

TemporalDataset parse_dataset(std::string_view text, DatasetCheck check) {
  TemporalDataset ds;
  std::map<std::string, Section> sections;
  Section* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = trimmed(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) throw DatasetError("", "malformed section header: " + line);
      std::string name = line.substr(1, close - 1);
      if (name != "INITIAL" && name != "LOOP" && name != "STANDARD" && name != "LONG_RANGE") {
        throw DatasetError(name, "unknown section");
      }
      if (sections.count(name)) throw DatasetError(name, "section appears twice");
      auto count = parse_uint(trimmed(std::string_view(line).substr(close + 1)));
      if (!count) throw DatasetError(name, "header needs a declared count, e.g. [" + name + "] 10");
      current = &sections[name];
      *current = Section{name, *count, 0};
      continue;
    }
    if (!current) throw DatasetError("", "content before the first section header: " + line);
    ++current->found;
    if (current->name == "INITIAL") {
      ds.initial.push_back(line);
    } else if (current->name == "LOOP") {
      ds.loop.push_back(line);
    } else {
      // Tabs matter here, so parse the untrimmed line.
      auto q = parse_question(raw, current->name);
      (current->name == "STANDARD" ? ds.standard : ds.long_range).push_back(std::move(q));
    }
  }

  for (const char* required : {"INITIAL", "LOOP", "STANDARD"}) {
    if (!sections.count(required)) throw DatasetError(required, "section is missing");
  }
  for (const auto& [name, s] : sections) {
    if (s.found != s.declared) {
      throw DatasetError(name, "declared " + std::to_string(s.declared) + " entries, found " +
                                   std::to_string(s.found));
    }
  }
  if (check == DatasetCheck::canonical) {
    auto expect = [](const char* name, std::size_t got, std::size_t want) {
      if (got != want) {
        throw DatasetError(name, "expected " + std::to_string(want) + " entries, found " + std::to_string(got));
      }
    };
    expect("INITIAL", ds.initial.size(), kInitialStatements);
    expect("LOOP", ds.loop.size(), kLoopStatements);
    expect("STANDARD", ds.standard.size(), kStandardQuestions);
  }
  if (ds.loop.empty()) throw DatasetError("LOOP", "loop section is empty");
  auto check_evidence = [&ds](const std::vector<Question>& questions, const char* section) {
    for (const auto& q : questions) {
      for (Timestep t : q.evidence) {
        if (t > ds.timesteps()) {
          throw DatasetError(section, "evidence timestep " + std::to_string(t) + " is past the last statement");
        }
      }
    }
  };
  check_evidence(ds.standard, "STANDARD");
  check_evidence(ds.long_range, "LONG_RANGE");
  return ds;
}

TemporalDataset load_dataset(const std::string& path, DatasetCheck check) {
  return parse_dataset(read_file(path), check);
}

const TemporalDataset& bundled_dataset() {
  static const TemporalDataset ds = parse_dataset(asset("temporal_dataset.txt"));
  return ds;
}

// ---------------------------------------------------------------- records

std::string_view to_string(SystemId id) {
  switch (id) {
    case SystemId::recallm: return "recallm";
    case SystemId::vectordb: return "vectordb";
    case SystemId::hybrid: return "hybrid";
    case SystemId::raw: return "raw";
  }
  return "recallm";
}

SystemId parse_system(std::string_view name) {
  for (auto id : {SystemId::recallm, SystemId::vectordb, SystemId::hybrid, SystemId::raw}) {
    if (to_string(id) == name) return id;
  }
  throw ArgumentError("unknown system '" + std::string(name) + "'");
}

std::string_view to_string(QuestionSet set) { return set == QuestionSet::standard ? "standard" : "long_range"; }

namespace {

QuestionSet parse_question_set(std::string_view name) {
  if (name == "standard") return QuestionSet::standard;
  if (name == "long_range") return QuestionSet::long_range;
  throw ArgumentError("unknown question set '" + std::string(name) + "'");
}

json optional_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> optional_string(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

}  // namespace

json to_json(const RunRecord& record) {
  json questions = json::array();
  for (const auto& q : record.questions) {
    questions.push_back({{"set", to_string(q.set)},
                         {"index", q.index},
                         {"question", q.question},
                         {"reference", q.reference},
                         {"answer", optional_json(q.answer)},
                         {"error", optional_json(q.error)},
                         {"evidence_hit", q.evidence_hit},
                         {"failed", q.failed},
                         {"context_exceeded", q.context_exceeded},
                         {"assembled_context", q.assembled_context},
                         {"trace", q.trace}});
  }
  return json{{"system", to_string(record.system)},
              {"checkpoint", record.checkpoint},
              {"counter", record.counter},
              {"vector_inserts", record.vector_inserts},
              {"config", record.config},
              {"questions", questions}};
}

RunRecord record_from_json(const json& doc) {
  try {
    RunRecord r;
    r.system = parse_system(doc.at("system").get<std::string>());
    r.checkpoint = doc.at("checkpoint").get<unsigned>();
    r.counter = doc.at("counter").get<Timestep>();
    r.vector_inserts = doc.at("vector_inserts").get<std::size_t>();
    r.config = doc.at("config");
    for (const auto& q : doc.at("questions")) {
      QuestionRecord qr;
      qr.set = parse_question_set(q.at("set").get<std::string>());
      qr.index = q.at("index").get<std::size_t>();
      qr.question = q.at("question").get<std::string>();
      qr.reference = q.at("reference").get<std::string>();
      qr.answer = optional_string(q.at("answer"));
      qr.error = optional_string(q.at("error"));
      qr.evidence_hit = q.at("evidence_hit").get<bool>();
      qr.failed = q.at("failed").get<bool>();
      qr.context_exceeded = q.at("context_exceeded").get<bool>();
      qr.assembled_context = q.at("assembled_context").get<std::string>();
      qr.trace = q.at("trace");
      r.questions.push_back(std::move(qr));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed run record: ") + e.what());
  }
}

std::string records_to_jsonl(std::span<const RunRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump(-1, ' ', false, json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

std::vector<RunRecord> records_from_jsonl(std::string_view text) {
  std::vector<RunRecord> records;
  std::size_t offset = 0;
  for (const auto& line : split(text, '\n')) {
    if (!trimmed(line).empty()) {
      try {
        records.push_back(record_from_json(json::parse(line)));
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("run record: ") + e.what(), offset + e.byte);
      }
    }
    offset += line.size() + 1;
  }
  return records;
}

// ---------------------------------------------------------------- running

json BenchConfig::snapshot() const {
  json revision_doc = {{"enabled", revision.enabled},
                       {"merges_per_revision", revision.merges_per_revision},
                       {"max_context_chars", revision.max_context_chars}};
  return json{{"repetitions", repetitions},
              {"checkpoints", checkpoints},
              {"retrieval", retrieval},
              {"revision", revision_doc},
              {"top_k", top_k},
              {"raw_budget", raw_budget},
              {"embedder", embedder ? embedder->name() : std::string("hashed-ngram")},
              {"embedding_dimension", embedder ? embedder->dimension() : HashedNgramEmbedder::kDefaultDimension},
              {"provider_mode", provider_mode},
              {"answers", answerer != nullptr},
              {"discriminator", discriminator ? "provider" : "heuristic"}};
}

std::string raw_prompt(std::span<const std::string> statements, std::string_view question) {
  std::string prompt(kChronologyPrefix);
  prompt += "\n\n";
  for (std::size_t i = 0; i < statements.size(); ++i) {
    if (i) prompt.push_back(' ');
    prompt += statements[i];
  }
  if (!statements.empty()) prompt += "\n\n";
  prompt += question;
  return prompt;
}

std::size_t raw_context_size(std::span<const std::string> statements) {
  std::size_t n = kChronologyPrefix.size() + 2;
  for (std::size_t i = 0; i < statements.size(); ++i) n += statements[i].size() + (i ? 1 : 0);
  return n;
}

namespace {

QuestionRecord base_record(QuestionSet set, std::size_t index, const Question& q) {
  QuestionRecord r;
  r.set = set;
  r.index = index;
  r.question = q.text;
  r.reference = q.reference;
  return r;
}

template <typename Trace>
void fill_from_trace(QuestionRecord& r, const Trace& trace, const TemporalDataset& ds, const Question& q) {
  r.trace = trace;
  r.assembled_context = trace.assembled_context;
  r.answer = trace.answer;
  r.error = trace.error;
  r.failed = trace.error.has_value();
  r.evidence_hit = evidence_recall(trace.assembled_context, ds, q);
}

QuestionRecord failed_record(QuestionRecord r, const std::string& message) {
  r.failed = true;
  r.error = message;
  r.trace = json{{"question", r.question}, {"error", message}};
  return r;
}

}  // namespace

BenchResult run_temporal_bench(const TemporalDataset& ds, const BenchConfig& cfg) {
  if (cfg.repetitions < 1) throw ArgumentError("repetitions must be at least 1");
  std::set<unsigned> checkpoints(cfg.checkpoints.begin(), cfg.checkpoints.end());
  for (unsigned c : checkpoints) {
    if (c < 1 || c > cfg.repetitions) {
      throw ArgumentError("checkpoint " + std::to_string(c) + " is outside 1.." + std::to_string(cfg.repetitions));
    }
  }
  if (cfg.systems.empty()) throw ArgumentError("no systems selected");

  auto embedder = cfg.embedder ? cfg.embedder : std::make_shared<HashedNgramEmbedder>();
  GraphStore graph;
  VectorStore vec(embedder);
  FallbackReviser fallback;
  Reviser& reviser = cfg.reviser ? *cfg.reviser : fallback;
  const json config_doc = cfg.snapshot();
  const std::string system_prompt = trimmed(answer_system_prompt());

  BenchResult result;
  std::vector<std::string> seen;
  std::size_t raw_size = raw_context_size({});

  auto ingest = [&](const std::string& statement) {
    knowledge_update(graph, statement, cfg.revision, reviser);
    vec.add(statement);
    ++result.vector_inserts;
    raw_size += statement.size() + (seen.empty() ? 0 : 1);
    seen.push_back(statement);
  };

  auto wants = [&cfg](SystemId id) { return cfg.systems.count(id) > 0; };
  const bool need_graph = wants(SystemId::recallm) || wants(SystemId::hybrid);
  const bool need_vector = wants(SystemId::vectordb) || wants(SystemId::hybrid);

  auto question_all = [&](unsigned rep) {
    std::map<SystemId, RunRecord> runs;
    for (SystemId id : cfg.systems) {
      runs[id] = RunRecord{id, rep, graph.counter(), result.vector_inserts, config_doc, {}};
    }
    const bool exceeded = result.raw_context_exceeded_at && rep >= *result.raw_context_exceeded_at;

    auto ask = [&](QuestionSet set, std::size_t index, const Question& q) {
      std::optional<RetrievalTrace> graph_trace;
      std::optional<VectorTrace> vector_trace;
      std::string graph_failure, vector_failure;
      if (need_graph) {
        try {
          graph_trace = answer(graph, q.text, cfg.answerer, cfg.retrieval);
        } catch (const std::exception& e) {
          graph_failure = e.what();
        }
      }
      if (need_vector) {
        try {
          vector_trace = answer_vec(vec, q.text, cfg.answerer, cfg.top_k);
        } catch (const std::exception& e) {
          vector_failure = e.what();
        }
      }

      QuestionRecord base = base_record(set, index, q);
      if (wants(SystemId::recallm)) {
        QuestionRecord r = base;
        if (graph_trace) fill_from_trace(r, *graph_trace, ds, q);
        else r = failed_record(base, graph_failure);
        runs[SystemId::recallm].questions.push_back(std::move(r));
      }
      if (wants(SystemId::vectordb)) {
        QuestionRecord r = base;
        if (vector_trace) fill_from_trace(r, *vector_trace, ds, q);
        else r = failed_record(base, vector_failure);
        runs[SystemId::vectordb].questions.push_back(std::move(r));
      }
      if (wants(SystemId::hybrid)) {
        QuestionRecord r = base;
        if (!graph_trace && !vector_trace) {
          r = failed_record(base, graph_failure + "; " + vector_failure);
        } else {
          RetrievalTrace g = graph_trace ? *graph_trace : RetrievalTrace{};
          if (!graph_trace) {
            g.question = q.text;
            g.error = graph_failure;
          }
          HybridTrace h = hybrid_from_traces(q.text, std::move(g), vector_trace, cfg.discriminator);
          r.trace = h;
          r.answer = h.answer();
          // Without a choice the graph side stands in, matching the tie rule.
          bool use_vector = h.chosen == Choice::vector;
          r.assembled_context = use_vector ? h.vector->assembled_context : h.graph.assembled_context;
          r.evidence_hit = evidence_recall(r.assembled_context, ds, q);
          r.failed = cfg.answerer != nullptr && !h.chosen.has_value();
          if (r.failed) r.error = "both backends failed";
        }
        runs[SystemId::hybrid].questions.push_back(std::move(r));
      }
      if (wants(SystemId::raw)) {
        QuestionRecord r = base;
        json trace = {{"question", q.text}, {"context_exceeded", exceeded}};
        if (exceeded) {
          r.context_exceeded = true;
        } else {
          r.assembled_context = raw_prompt(seen, q.text);
          r.evidence_hit = evidence_recall(r.assembled_context, ds, q);
          if (cfg.answerer) {
            try {
              r.answer = trimmed(cfg.answerer->complete(ChatRequest::user(r.assembled_context, system_prompt)));
            } catch (const std::exception& e) {
              r.failed = true;
              r.error = e.what();
            }
          }
        }
        trace["assembled_context"] = r.assembled_context;
        trace["answer"] = optional_json(r.answer);
        trace["error"] = optional_json(r.error);
        r.trace = std::move(trace);
        runs[SystemId::raw].questions.push_back(std::move(r));
      }
    };

    for (std::size_t i = 0; i < ds.standard.size(); ++i) ask(QuestionSet::standard, i, ds.standard[i]);
    if (cfg.long_range) {
      for (std::size_t i = 0; i < ds.long_range.size(); ++i) ask(QuestionSet::long_range, i, ds.long_range[i]);
    }
    for (SystemId id : cfg.systems) result.records.push_back(std::move(runs[id]));
  };

  for (const auto& s : ds.initial) ingest(s);
  for (unsigned rep = 1; rep <= cfg.repetitions; ++rep) {
    for (const auto& s : ds.loop) ingest(s);
    if (!result.raw_context_exceeded_at && raw_size > cfg.raw_budget) result.raw_context_exceeded_at = rep;
    if (checkpoints.count(rep)) question_all(rep);
  }
  result.final_counter = graph.counter();
  return result;
}

// ---------------------------------------------------------------- scoring

bool evidence_recall(std::string_view context, const TemporalDataset& ds, const Question& q) {
  if (context.empty() || q.evidence.empty()) return false;
  return std::all_of(q.evidence.begin(), q.evidence.end(), [&](Timestep t) {
    return context.find(ds.statement_at(t)) != std::string_view::npos;
  });
}

std::vector<std::size_t> covered_questions(const TemporalDataset& ds, const GraphStore& store,
                                           const NounTagger& tagger) {
  std::vector<std::size_t> covered;
  for (std::size_t i = 0; i < ds.standard.size(); ++i) {
    auto labels = essential_labels(ds.standard[i].text, tagger);
    bool all_found = !labels.empty() && std::all_of(labels.begin(), labels.end(),
                                                    [&](const std::string& l) { return store.find(l) != nullptr; });
    if (all_found) covered.push_back(i);
  }
  return covered;
}

double accuracy_percent(std::size_t k, std::size_t n) {
  if (n == 0) throw ArgumentError("accuracy over zero questions");
  return 100.0 * static_cast<double>(k) / static_cast<double>(n);
}

std::string format_percent(std::size_t k, std::size_t n) {
  if (n == 0) throw ArgumentError("accuracy over zero questions");
  if (k > n) throw ArgumentError("more correct answers than questions");
  // Hundredths of a percent, rounded half up in integer arithmetic.
  std::uint64_t hundredths = (static_cast<std::uint64_t>(k) * 20000 + n) / (2 * static_cast<std::uint64_t>(n));
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + frac;
}

std::map<CheckpointKey, Accuracy> summarize(std::span<const RunRecord> records) {
  std::map<CheckpointKey, Accuracy> out;
  for (const auto& r : records) {
    for (const auto& q : r.questions) {
      auto& acc = out[CheckpointKey{r.system, r.checkpoint, q.set}];
      ++acc.total;
      if (q.evidence_hit) ++acc.correct;
    }
  }
  return out;
}

// ---------------------------------------------------------------- grading

namespace {

std::string csv_field(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::size_t export_blind_grading(std::span<const RunRecord> records, const std::string& csv_path,
                                 const std::string& mapping_path, std::uint64_t seed) {
  struct Row {
    const RunRecord* run;
    const QuestionRecord* q;
  };
  std::vector<Row> rows;
  for (const auto& r : records) {
    for (const auto& q : r.questions) {
      if (q.answer) rows.push_back(Row{&r, &q});
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);

  std::string csv = "row_id,question,reference,response\n";
  std::string mapping;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string id = std::to_string(i + 1);
    id.insert(0, id.size() < 6 ? 6 - id.size() : 0, '0');
    id.insert(0, "row-");
    const auto& q = *rows[i].q;
    csv += csv_field(id) + "," + csv_field(q.question) + "," + csv_field(q.reference) + "," +
           csv_field(*q.answer) + "\n";
    mapping += json{{"row_id", id},
                    {"system", to_string(rows[i].run->system)},
                    {"checkpoint", rows[i].run->checkpoint},
                    {"set", to_string(q.set)},
                    {"index", q.index}}
                   .dump() +
               "\n";
  }
  write_file(csv_path, csv);
  write_file(mapping_path, mapping);
  return rows.size();
}

std::map<CheckpointKey, Accuracy> import_grades(const std::string& grades_path, const std::string& mapping_path) {
  std::map<std::string, CheckpointKey> mapping;
  for (const auto& line : split(read_file(mapping_path), '\n')) {
    if (trimmed(line).empty()) continue;
    try {
      auto doc = json::parse(line);
      mapping.emplace(doc.at("row_id").get<std::string>(),
                      CheckpointKey{parse_system(doc.at("system").get<std::string>()),
                                    doc.at("checkpoint").get<unsigned>(),
                                    parse_question_set(doc.at("set").get<std::string>())});
    } catch (const json::exception& e) {
      throw GradeError(std::string("malformed mapping line: ") + e.what());
    }
  }

  std::map<CheckpointKey, Accuracy> out;
  std::set<std::string> graded;
  for (const auto& line : split(read_file(grades_path), '\n')) {
    if (trimmed(line).empty()) continue;
    std::string id, grade;
    try {
      auto doc = json::parse(line);
      id = doc.at("row_id").get<std::string>();
      grade = doc.at("grade").get<std::string>();
    } catch (const json::exception& e) {
      throw GradeError(std::string("malformed grade line: ") + e.what());
    }
    auto it = mapping.find(id);
    if (it == mapping.end()) throw GradeError("unknown row id '" + id + "'");
    if (!graded.insert(id).second) throw GradeError("row id '" + id + "' graded twice");
    auto& acc = out[it->second];
    if (grade == "correct") {
      ++acc.correct;
      ++acc.total;
    } else if (grade == "incorrect") {
      ++acc.total;
    } else {
      throw GradeError("grade for '" + id + "' must be correct or incorrect, got '" + grade + "'");
    }
  }
  for (const auto& [id, key] : mapping) {
    if (!graded.count(id)) ++out[key].ungraded;
  }
  return out;
}

std::string render_autograde_prompt(std::string_view question, std::string_view reference,
                                    std::string_view response) {
  std::string prompt(asset("prompts/autograde.txt"));
  for (auto [placeholder, value] : {std::pair<std::string_view, std::string_view>{"{question}", question},
                                    {"{reference}", reference},
                                    {"{response}", response}}) {
    auto pos = prompt.find(placeholder);
    if (pos != std::string::npos) prompt.replace(pos, placeholder.size(), value);
  }
  return prompt;
}

std::optional<int> parse_grade(std::string_view reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    char c = reply[i];
    if (!std::isdigit(static_cast<unsigned char>(c))) continue;
    std::size_t end = i;
    while (end < reply.size() && std::isdigit(static_cast<unsigned char>(reply[end]))) ++end;
    bool decimal = end < reply.size() && reply[end] == '.' && end + 1 < reply.size() &&
                   std::isdigit(static_cast<unsigned char>(reply[end + 1]));
    if (end - i == 1 && !decimal && c <= '2') return c - '0';
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> autograde_3pt(std::string_view question, std::string_view reference, std::string_view response,
                                 ChatProvider& grader) {
  return parse_grade(grader.complete(ChatRequest::user(render_autograde_prompt(question, reference, response))));
}

AutogradeSummary summarize_grades(std::span<const std::optional<int>> grades) {
  AutogradeSummary s;
  for (const auto& g : grades) {
    if (g) {
      s.total += *g;
      ++s.graded;
    } else {
      ++s.ungraded;
    }
  }
  return s;
}

// ---------------------------------------------------------------- offline stubs

namespace {

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "a",    "an",   "and",  "are",  "at",    "be",   "did",  "do",   "does", "for",  "from",  "has",
      "have", "he",   "his",  "how",  "i",     "in",   "is",   "it",   "of",   "on",   "or",    "she",
      "that", "the",  "their", "this", "to",   "was",  "what", "when", "where", "which", "who", "why",
      "will", "with", "you",  "your", "currently", "now",
  };
  return words;
}

std::set<std::string> content_stems(std::string_view text) {
  std::set<std::string> stems;
  for (const auto& token : tokenize(text)) {
    std::string word = lowercase(strip_possessive(token));
    if (word.empty() || stopwords().count(word)) continue;
    stems.insert(stem(word));
  }
  return stems;
}

// The line after the last blank line.
std::string after_last_blank(std::string_view text) {
  auto pos = text.rfind("\n\n");
  return std::string(pos == std::string_view::npos ? text : text.substr(pos + 2));
}

std::string line_value(std::string_view prompt, std::string_view key) {
  auto pos = prompt.rfind(key);
  if (pos == std::string_view::npos) return {};
  auto start = pos + key.size();
  auto end = prompt.find('\n', start);
  return trimmed(prompt.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

}  // namespace

ScriptedProvider::Responder extractive_answerer() {
  return [](const ChatRequest& request) -> std::string {
    if (request.messages.empty()) return std::string(kDeclineAnswer);
    std::string_view content = request.messages.back().content;
    std::string question = after_last_blank(content);
    auto split_at = content.rfind("\n\n");
    if (split_at == std::string_view::npos) return std::string(kDeclineAnswer);
    std::string_view body = content.substr(0, split_at);
    if (body.starts_with(kChronologyPrefix)) body.remove_prefix(kChronologyPrefix.size());

    auto wanted = content_stems(question);
    std::size_t best_overlap = 0;
    std::string best;
    for (const auto& sentence : split_sentences(body)) {
      auto stems = content_stems(sentence.text);
      std::size_t overlap = 0;
      for (const auto& s : wanted) overlap += stems.count(s);
      if (overlap > 0 && overlap >= best_overlap) {
        best_overlap = overlap;
        best = sentence.text;
      }
    }
    return best.empty() ? std::string(kDeclineAnswer) : best;
  };
}

ScriptedProvider::Responder rubric_grader() {
  return [](const ChatRequest& request) -> std::string {
    std::string prompt = request.full_text();
    std::string reference = line_value(prompt, "Reference answer:");
    std::string response = line_value(prompt, "Response:");
    if (response == reference) return "2";
    if (!reference.empty() && lowercase(response).find(lowercase(reference)) != std::string::npos) return "1";
    return "0";
  };
}

}  // namespace recallm
