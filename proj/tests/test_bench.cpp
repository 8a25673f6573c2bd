#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "recallm/bench.hpp"

using namespace recallm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string fixture_text() { return read_file(fs::path(RECALLM_SOURCE_DIR) / "data" / "temporal_dataset.txt"); }

// Statement lines of one section, read straight from the fixture file.
std::vector<std::string> section_lines(const std::string& text, const std::string& header) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.rfind("[", 0) == 0) {
      inside = line.rfind("[" + header + "]", 0) == 0;
      continue;
    }
    if (inside && !line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("recallm-bench-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

BenchConfig offline_config(unsigned reps, std::vector<unsigned> checkpoints, ChatProvider* answerer) {
  BenchConfig cfg;
  cfg.repetitions = reps;
  cfg.checkpoints = std::move(checkpoints);
  cfg.answerer = answerer;
  return cfg;
}

RunRecord synthetic_run(SystemId system, unsigned checkpoint, std::size_t n, std::size_t correct_prefix) {
  RunRecord r;
  r.system = system;
  r.checkpoint = checkpoint;
  for (std::size_t i = 0; i < n; ++i) {
    QuestionRecord q;
    q.index = i;
    q.question = "Question " + std::to_string(i) + "?";
    q.reference = "Ref " + std::to_string(i);
    q.answer = i < correct_prefix ? q.reference : "Wrong";
    r.questions.push_back(q);
  }
  return r;
}

}  // namespace

TEST(Dataset, BundledCounts) {
  const auto& ds = bundled_dataset();
  EXPECT_EQ(ds.initial.size(), 10u);
  EXPECT_EQ(ds.loop.size(), 62u);
  EXPECT_EQ(ds.standard.size(), 21u);
  EXPECT_EQ(ds.long_range.size(), 11u);
  EXPECT_EQ(ds.statement_at(1), "Brandon is South African.");
  EXPECT_EQ(ds.statement_at(72), "Brandon's favorite color is green.");
}

TEST(Dataset, FileMatchesBundledCopy) {
  auto ds = load_dataset((fs::path(RECALLM_SOURCE_DIR) / "data" / "temporal_dataset.txt").string());
  EXPECT_EQ(ds.loop, bundled_dataset().loop);
  EXPECT_EQ(ds.standard, bundled_dataset().standard);
}

TEST(Dataset, DeletedLoopRowIsAnError) {
  std::string text = fixture_text();
  auto pos = text.find("Brandon just ate a steak.\n");
  ASSERT_NE(pos, std::string::npos);
  text.erase(pos, std::string("Brandon just ate a steak.\n").size());
  try {
    parse_dataset(text);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.section(), "LOOP");
  }
}

TEST(Dataset, EmptyFileIsAnError) { EXPECT_THROW(parse_dataset(""), DatasetError); }

TEST(Dataset, DeclaredOnlyAcceptsSmallFixtures) {
  const char* text =
      "[INITIAL] 1\nA is here.\n[LOOP] 2\nA is red.\nA is blue.\n"
      "[STANDARD] 1\nWhat color is A?\tblue\t3\n";
  auto ds = parse_dataset(text, DatasetCheck::declared_only);
  EXPECT_EQ(ds.timesteps(), 3u);
  EXPECT_EQ(ds.standard[0].evidence, (std::vector<Timestep>{3}));
  EXPECT_THROW(parse_dataset(text), DatasetError);
}

TEST(Dataset, EvidencePastLastStatementIsAnError) {
  const char* text = "[INITIAL] 1\nA.\n[LOOP] 1\nB.\n[STANDARD] 1\nQ?\tR\t9\n";
  EXPECT_THROW(parse_dataset(text, DatasetCheck::declared_only), DatasetError);
}

TEST(Bench, SingleRepetitionRecordSet) {
  ScriptedProvider answerer(extractive_answerer());
  auto result = run_temporal_bench(bundled_dataset(), offline_config(1, {1}, &answerer));
  EXPECT_EQ(result.final_counter, 72u);
  ASSERT_EQ(result.records.size(), 4u);
  for (const auto& r : result.records) {
    EXPECT_EQ(r.checkpoint, 1u);
    EXPECT_EQ(r.questions.size(), 21u + 11u);
    EXPECT_EQ(r.config.at("retrieval").at("max_prompt_concepts"), 10);
    EXPECT_EQ(r.config.at("retrieval").at("temporal_window"), 3);
  }
}

TEST(Bench, RepetitionAndCheckpointValidation) {
  EXPECT_THROW(run_temporal_bench(bundled_dataset(), offline_config(0, {}, nullptr)), ArgumentError);
  EXPECT_THROW(run_temporal_bench(bundled_dataset(), offline_config(2, {3}, nullptr)), ArgumentError);
}

TEST(Bench, BackendParityAtEveryCheckpoint) {
  auto result = run_temporal_bench(bundled_dataset(), offline_config(5, {1, 3, 5}, nullptr));
  for (const auto& r : result.records) {
    EXPECT_EQ(r.counter, 10u + 62u * r.checkpoint);
    EXPECT_EQ(r.vector_inserts, r.counter);
  }
  EXPECT_EQ(result.vector_inserts, result.final_counter);
}

TEST(Bench, OfflineRunsAreByteIdentical) {
  ScriptedProvider a(extractive_answerer());
  ScriptedProvider b(extractive_answerer());
  auto first = run_temporal_bench(bundled_dataset(), offline_config(3, {1, 3}, &a));
  auto second = run_temporal_bench(bundled_dataset(), offline_config(3, {1, 3}, &b));
  EXPECT_EQ(records_to_jsonl(first.records), records_to_jsonl(second.records));
}

TEST(Bench, RecordsRoundTripThroughJsonLines) {
  ScriptedProvider answerer(extractive_answerer());
  auto result = run_temporal_bench(bundled_dataset(), offline_config(1, {1}, &answerer));
  auto text = records_to_jsonl(result.records);
  auto back = records_from_jsonl(text);
  ASSERT_EQ(back.size(), result.records.size());
  EXPECT_EQ(records_to_jsonl(back), text);
}

TEST(Bench, BackendFailureMarksRecordsAndContinues) {
  ScriptedProvider failing(ScriptedProvider::failing("offline"));
  auto result = run_temporal_bench(bundled_dataset(), offline_config(1, {1}, &failing));
  for (const auto& r : result.records) {
    for (const auto& q : r.questions) {
      if (r.system == SystemId::raw && q.context_exceeded) continue;
      EXPECT_TRUE(q.failed) << to_string(r.system);
      EXPECT_TRUE(q.error.has_value());
    }
  }
}

// Independent tally of the raw baseline's prompt: prefix, blank line, then
// every statement so far separated by spaces.
TEST(Bench, RawBaselineExceedsBudgetWhereTheTallySays) {
  std::string text = fixture_text();
  auto initial = section_lines(text, "INITIAL");
  auto loop = section_lines(text, "LOOP");
  ASSERT_EQ(initial.size(), 10u);
  ASSERT_EQ(loop.size(), 62u);
  std::size_t chars = std::string("each sentence in the following statements is true when read in chronological order").size() + 2;
  std::size_t statements = 0;
  auto add = [&](const std::string& s) { chars += s.size() + (statements++ ? 1 : 0); };
  for (const auto& s : initial) add(s);
  std::optional<unsigned> expected;
  for (unsigned rep = 1; rep <= 10 && !expected; ++rep) {
    for (const auto& s : loop) add(s);
    if (chars > 16000) expected = rep;
  }
  ASSERT_TRUE(expected.has_value());

  auto result = run_temporal_bench(bundled_dataset(), offline_config(8, {1, 5, 8}, nullptr));
  EXPECT_EQ(result.raw_context_exceeded_at, expected);
  EXPECT_LE(*result.raw_context_exceeded_at, 6u);
  for (const auto& r : result.records) {
    if (r.system != SystemId::raw) continue;
    for (const auto& q : r.questions) EXPECT_EQ(q.context_exceeded, r.checkpoint >= *expected);
  }
}

TEST(Bench, RawContextSizeMatchesPrompt) {
  std::vector<std::string> s{"A b.", "C d."};
  auto prompt = raw_prompt(s, "Q?");
  EXPECT_EQ(prompt, std::string(kChronologyPrefix) + "\n\nA b. C d.\n\nQ?");
  EXPECT_EQ(raw_context_size(s), prompt.size() - std::string("\n\nQ?").size());
}

TEST(EvidenceRecall, EmptyContextIsFalse) {
  const auto& ds = bundled_dataset();
  EXPECT_FALSE(evidence_recall("", ds, ds.standard[17]));
}

TEST(EvidenceRecall, ColorQuestionHitsForGraphWithoutRevision) {
  const auto& ds = bundled_dataset();
  ASSERT_EQ(ds.standard[17].text, "What is Brandon's favorite color?");
  auto cfg = offline_config(1, {1}, nullptr);
  cfg.revision.enabled = false;
  auto result = run_temporal_bench(ds, cfg);
  for (const auto& r : result.records) {
    const auto& q = r.questions[17];
    EXPECT_EQ(q.evidence_hit, q.assembled_context.find("Brandon's favorite color is green.") != std::string::npos)
        << to_string(r.system);
    if (r.system == SystemId::recallm) EXPECT_TRUE(q.evidence_hit);
  }
}

TEST(EvidenceRecall, AllStatementsRequired) {
  const auto& ds = bundled_dataset();
  Question q{"q", "r", {1, 4}};
  EXPECT_FALSE(evidence_recall(ds.statement_at(1), ds, q));
  EXPECT_TRUE(evidence_recall(ds.statement_at(4) + " " + ds.statement_at(1), ds, q));
}

TEST(Accuracy, PercentGrid) {
  EXPECT_EQ(format_percent(20, 21), "95.24");
  EXPECT_EQ(format_percent(17, 21), "80.95");
  EXPECT_EQ(format_percent(16, 21), "76.19");
  EXPECT_EQ(format_percent(4, 21), "19.05");
  EXPECT_EQ(format_percent(8, 21), "38.10");
  EXPECT_EQ(format_percent(21, 21), "100.00");
  EXPECT_EQ(format_percent(0, 21), "0.00");
  EXPECT_EQ(format_percent(11, 12), "91.67");
  EXPECT_EQ(format_percent(4, 12), "33.33");
  // 15/21 = 71.428..., which rounds to 71.43.
  EXPECT_EQ(format_percent(15, 21), "71.43");
  EXPECT_NEAR(accuracy_percent(15, 21), 71.428571, 1e-6);
  EXPECT_THROW(format_percent(1, 0), ArgumentError);
  EXPECT_THROW(format_percent(3, 2), ArgumentError);
}

TEST(BlindGrading, ExportHidesSystems) {
  TempDir dir;
  std::vector<RunRecord> records{synthetic_run(SystemId::recallm, 1, 3, 3), synthetic_run(SystemId::vectordb, 1, 3, 1)};
  auto rows = export_blind_grading(records, (dir / "sheet.csv").string(), (dir / "map.jsonl").string());
  EXPECT_EQ(rows, 6u);
  auto csv = read_file(dir / "sheet.csv");
  EXPECT_EQ(csv.rfind("row_id,question,reference,response\n", 0), 0u);
  for (const char* name : {"recallm", "vectordb", "hybrid", "raw"}) EXPECT_EQ(csv.find(name), std::string::npos);
  auto mapping = read_file(dir / "map.jsonl");
  EXPECT_NE(mapping.find("\"recallm\""), std::string::npos);
}

TEST(BlindGrading, AllCorrectGivesFullMarks) {
  TempDir dir;
  std::vector<RunRecord> records{synthetic_run(SystemId::recallm, 1, 4, 4), synthetic_run(SystemId::recallm, 5, 4, 4)};
  export_blind_grading(records, (dir / "sheet.csv").string(), (dir / "map.jsonl").string());
  std::string grades;
  for (int i = 1; i <= 8; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "row-%06d", i);
    grades += json{{"row_id", id}, {"grade", "correct"}}.dump() + "\n";
  }
  write_file(dir / "grades.jsonl", grades);
  auto acc = import_grades((dir / "grades.jsonl").string(), (dir / "map.jsonl").string());
  ASSERT_EQ(acc.size(), 2u);
  for (const auto& [key, a] : acc) {
    EXPECT_EQ(a.percent(), "100.00");
    EXPECT_EQ(a.ungraded, 0u);
  }
}

TEST(BlindGrading, TwentyOfTwentyOne) {
  TempDir dir;
  std::vector<RunRecord> records{synthetic_run(SystemId::recallm, 1, 21, 20)};
  export_blind_grading(records, (dir / "sheet.csv").string(), (dir / "map.jsonl").string(), 7);
  // Grade from the sheet alone: the response must equal the reference.
  std::istringstream csv(read_file(dir / "sheet.csv"));
  std::string line, grades;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    auto field = [&line](int n) {
      std::size_t pos = 0;
      for (int i = 0; i < n; ++i) pos = line.find("\",\"", pos) + 3;
      if (n == 0) pos = 1;
      auto end = line.find('"', pos);
      return line.substr(pos, end - pos);
    };
    grades += json{{"row_id", field(0)}, {"grade", field(2) == field(3) ? "correct" : "incorrect"}}.dump() + "\n";
  }
  write_file(dir / "grades.jsonl", grades);
  auto acc = import_grades((dir / "grades.jsonl").string(), (dir / "map.jsonl").string());
  auto a = acc.at(CheckpointKey{SystemId::recallm, 1, QuestionSet::standard});
  EXPECT_EQ(a.correct, 20u);
  EXPECT_EQ(a.total, 21u);
  EXPECT_EQ(a.percent(), "95.24");
}

TEST(BlindGrading, UnknownAndDuplicateRowsRejected) {
  TempDir dir;
  std::vector<RunRecord> records{synthetic_run(SystemId::recallm, 1, 2, 2)};
  export_blind_grading(records, (dir / "sheet.csv").string(), (dir / "map.jsonl").string());
  write_file(dir / "g1.jsonl", R"({"row_id":"row-999999","grade":"correct"})" "\n");
  EXPECT_THROW(import_grades((dir / "g1.jsonl").string(), (dir / "map.jsonl").string()), GradeError);
  write_file(dir / "g2.jsonl",
             R"({"row_id":"row-000001","grade":"correct"})" "\n" R"({"row_id":"row-000001","grade":"correct"})" "\n");
  EXPECT_THROW(import_grades((dir / "g2.jsonl").string(), (dir / "map.jsonl").string()), GradeError);
  write_file(dir / "g3.jsonl", R"({"row_id":"row-000001","grade":"maybe"})" "\n");
  EXPECT_THROW(import_grades((dir / "g3.jsonl").string(), (dir / "map.jsonl").string()), GradeError);
}

TEST(BlindGrading, UnansweredQuestionsSkipped) {
  TempDir dir;
  auto run = synthetic_run(SystemId::raw, 1, 3, 3);
  run.questions[1].answer.reset();
  std::vector<RunRecord> records{run};
  EXPECT_EQ(export_blind_grading(records, (dir / "s.csv").string(), (dir / "m.jsonl").string()), 2u);
}

TEST(Autograde, AllTwosIsFullMarks) {
  ScriptedProvider grader("2");
  std::vector<std::optional<int>> grades;
  for (int i = 0; i < 3; ++i) grades.push_back(autograde_3pt("Q?", "A", "A", grader));
  auto s = summarize_grades(grades);
  EXPECT_DOUBLE_EQ(s.accuracy(), 1.0);
  EXPECT_EQ(s.total, 6);
}

TEST(Autograde, MixedScoresHalf) {
  std::vector<std::optional<int>> grades{2, 1, 0};
  EXPECT_DOUBLE_EQ(summarize_grades(grades).accuracy(), 0.5);
}

TEST(Autograde, RubricGraderExactMatch) {
  ScriptedProvider grader(rubric_grader());
  EXPECT_EQ(autograde_3pt("Where does Brandon work?", "Cisco", "Cisco", grader), 2);
  EXPECT_EQ(autograde_3pt("Where does Brandon work?", "Cisco", "He works at cisco these days.", grader), 1);
  EXPECT_EQ(autograde_3pt("Where does Brandon work?", "Cisco", "Paris", grader), 0);
}

TEST(Autograde, UnparseableGradeExcluded) {
  ScriptedProvider grader("excellent");
  std::vector<std::optional<int>> grades{autograde_3pt("Q?", "A", "A", grader), 2};
  auto s = summarize_grades(grades);
  EXPECT_EQ(s.ungraded, 1u);
  EXPECT_EQ(s.graded, 1u);
  EXPECT_DOUBLE_EQ(s.accuracy(), 1.0);
  EXPECT_EQ(parse_grade("Grade: 1"), 1);
  EXPECT_EQ(parse_grade("3"), std::nullopt);
  EXPECT_EQ(parse_grade("1.5"), std::nullopt);
}

TEST(OfflineAnswerer, PicksLatestMatchingSentence) {
  ScriptedProvider p(extractive_answerer());
  std::string prompt = std::string(kChronologyPrefix) +
                       "\n\nBrandon's favorite color is red. Brandon's favorite color is green.\n\n"
                       "What is Brandon's favorite color?";
  EXPECT_EQ(p.complete(ChatRequest::user(prompt)), "Brandon's favorite color is green.");
  EXPECT_EQ(p.complete(ChatRequest::user("Nothing here.\n\nWho is Zed?")), kDeclineAnswer);
}

TEST(Summarize, CountsEvidenceHits) {
  RunRecord r;
  r.system = SystemId::vectordb;
  r.checkpoint = 5;
  for (int i = 0; i < 4; ++i) {
    QuestionRecord q;
    q.evidence_hit = i < 3;
    r.questions.push_back(q);
  }
  std::vector<RunRecord> records{r};
  auto acc = summarize(records).at(CheckpointKey{SystemId::vectordb, 5, QuestionSet::standard});
  EXPECT_EQ(acc.correct, 3u);
  EXPECT_EQ(acc.total, 4u);
  EXPECT_EQ(acc.percent(), "75.00");
}
