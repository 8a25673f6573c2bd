#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recallm/hybrid.hpp"
#include "recallm/update.hpp"

namespace recallm {

// ---------------------------------------------------------------- dataset

struct Question {
  std::string text;
  std::string reference;
  std::vector<Timestep> evidence;  // absolute timesteps of the latest truth statements

  bool operator==(const Question&) const = default;
};

struct TemporalDataset {
  std::vector<std::string> initial;
  std::vector<std::string> loop;
  std::vector<Question> standard;
  std::vector<Question> long_range;

  // Statement at absolute timestep t: 1..|initial| then the loop.
  const std::string& statement_at(Timestep t) const;
  std::size_t timesteps() const { return initial.size() + loop.size(); }
};

inline constexpr std::size_t kInitialStatements = 10;
inline constexpr std::size_t kLoopStatements = 62;
inline constexpr std::size_t kStandardQuestions = 21;

enum class DatasetCheck {
  canonical,      // declared counts and the published sizes 10 / 62 / 21
  declared_only,  // declared counts only
};

// Fixture format: '#' comment lines and blank lines are ignored; section
// headers are "[INITIAL] n", "[LOOP] n", "[STANDARD] n", "[LONG_RANGE] n";
// statement sections hold one statement per line; question sections hold
// question<TAB>reference<TAB>comma-separated evidence timesteps.
TemporalDataset parse_dataset(std::string_view text, DatasetCheck check = DatasetCheck::canonical);
TemporalDataset load_dataset(const std::string& path, DatasetCheck check = DatasetCheck::canonical);
// The fixture compiled into the library.
const TemporalDataset& bundled_dataset();

// ---------------------------------------------------------------- records

enum class SystemId { recallm, vectordb, hybrid, raw };

std::string_view to_string(SystemId id);
SystemId parse_system(std::string_view name);

enum class QuestionSet { standard, long_range };
std::string_view to_string(QuestionSet set);

struct QuestionRecord {
  QuestionSet set = QuestionSet::standard;
  std::size_t index = 0;
  std::string question;
  std::string reference;
  nlohmann::json trace;  // the system's full trace document
  std::string assembled_context;
  std::optional<std::string> answer;
  std::optional<std::string> error;
  bool evidence_hit = false;
  bool failed = false;
  bool context_exceeded = false;
};

struct RunRecord {
  SystemId system = SystemId::recallm;
  unsigned checkpoint = 0;
  Timestep counter = 0;          // graph counter when questioned
  std::size_t vector_inserts = 0;  // statements fed to the vector store
  nlohmann::json config;
  std::vector<QuestionRecord> questions;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& doc);
// One JSON document per line.
std::string records_to_jsonl(std::span<const RunRecord> records);
std::vector<RunRecord> records_from_jsonl(std::string_view text);

// ---------------------------------------------------------------- running

inline constexpr std::size_t kDefaultRawBudget = 16000;

struct BenchConfig {
  unsigned repetitions = 25;
  std::vector<unsigned> checkpoints = {1, 5, 10, 15, 20, 25};
  std::set<SystemId> systems = {SystemId::recallm, SystemId::vectordb, SystemId::hybrid, SystemId::raw};
  bool long_range = true;

  RetrievalConfig retrieval;
  RevisionPolicy revision;
  std::size_t top_k = kDefaultTopK;
  std::size_t raw_budget = kDefaultRawBudget;  // characters of prefix + statements

  // Not owned. A null answerer runs retrieval only. A null discriminator
  // uses the heuristic. A null reviser uses FallbackReviser.
  ChatProvider* answerer = nullptr;
  ChatProvider* discriminator = nullptr;
  Reviser* reviser = nullptr;
  std::shared_ptr<Embedder> embedder;  // null: HashedNgramEmbedder
  std::string provider_mode = "offline";

  nlohmann::json snapshot() const;
};

struct BenchResult {
  std::vector<RunRecord> records;
  Timestep final_counter = 0;
  std::size_t vector_inserts = 0;
  // First repetition after which prefix + all statements exceed raw_budget.
  std::optional<unsigned> raw_context_exceeded_at;
};

// Ingests the initial statements once and the loop `repetitions` times, one
// knowledge update per statement into both backends, and questions every
// configured system after each checkpoint repetition. Backend failures mark
// the question record failed and the run continues.
BenchResult run_temporal_bench(const TemporalDataset& dataset, const BenchConfig& config);

// Prompt of the memoryless baseline: prefix, blank line, every statement so
// far joined by single spaces, blank line, question.
std::string raw_prompt(std::span<const std::string> statements, std::string_view question);
// prefix + blank line + statements, the part compared with the budget.
std::size_t raw_context_size(std::span<const std::string> statements);

// ---------------------------------------------------------------- scoring

// True iff every evidence statement occurs verbatim in context.
bool evidence_recall(std::string_view context, const TemporalDataset& dataset, const Question& question);

// Indices of standard questions whose essential concepts are all nodes of
// store (and that have at least one).
std::vector<std::size_t> covered_questions(const TemporalDataset& dataset, const GraphStore& store,
                                           const NounTagger& tagger = RuleTagger::bundled());

// k / n as a percentage.
double accuracy_percent(std::size_t k, std::size_t n);
// k / n as a percentage rounded half up to two decimals, e.g. "95.24".
std::string format_percent(std::size_t k, std::size_t n);

struct Accuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t ungraded = 0;
  std::string percent() const { return total ? format_percent(correct, total) : "n/a"; }
};

struct CheckpointKey {
  SystemId system;
  unsigned checkpoint;
  QuestionSet set;
  auto operator<=>(const CheckpointKey&) const = default;
};

// Evidence-recall counts per system, checkpoint and question set.
std::map<CheckpointKey, Accuracy> summarize(std::span<const RunRecord> records);

// ---------------------------------------------------------------- grading

// Writes a CSV of (row_id, question, reference, response) in shuffled order,
// plus a JSON-lines mapping from row id back to system and checkpoint.
// Returns the number of rows. Questions without an answer are skipped.
std::size_t export_blind_grading(std::span<const RunRecord> records, const std::string& csv_path,
                                 const std::string& mapping_path, std::uint64_t seed = 1);

// Grades are JSON lines {"row_id": ..., "grade": "correct" | "incorrect"}.
// Throws GradeError for unknown row ids or grade values.
std::map<CheckpointKey, Accuracy> import_grades(const std::string& grades_path, const std::string& mapping_path);

std::string render_autograde_prompt(std::string_view question, std::string_view reference, std::string_view response);
// First standalone 0, 1 or 2 in the reply.
std::optional<int> parse_grade(std::string_view reply);
// Empty result: the grader's reply could not be parsed.
std::optional<int> autograde_3pt(std::string_view question, std::string_view reference, std::string_view response,
                                 ChatProvider& grader);

struct AutogradeSummary {
  long total = 0;
  std::size_t graded = 0;
  std::size_t ungraded = 0;
  // total / (2 * graded)
  double accuracy() const { return graded ? static_cast<double>(total) / (2.0 * static_cast<double>(graded)) : 0.0; }
};
AutogradeSummary summarize_grades(std::span<const std::optional<int>> grades);

// ---------------------------------------------------------------- offline stubs

// Answers with the context sentence sharing the most content words with the
// question, the later one on ties; with no overlap it declines.
ScriptedProvider::Responder extractive_answerer();
// Follows the bundled rubric: 2 when the response equals the reference, 1
// when it contains it (ignoring case), 0 otherwise.
ScriptedProvider::Responder rubric_grader();

inline constexpr std::string_view kDeclineAnswer = "I do not have enough information to answer the question.";

}  // namespace recallm
