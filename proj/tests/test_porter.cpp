#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "recallm/extract.hpp"

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

// The published sample vocabulary and its expected output, as distributed
// with the reference implementation.
TEST(Porter, MatchesReferenceVocabulary) {
  auto words = read_lines(std::string(RECALLM_TEST_DATA) + "/porter_voc.txt");
  auto expected = read_lines(std::string(RECALLM_TEST_DATA) + "/porter_output.txt");
  ASSERT_EQ(words.size(), 23531u);
  ASSERT_EQ(words.size(), expected.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (recallm::stem(words[i]) != expected[i]) {
      if (++mismatches <= 10) ADD_FAILURE() << words[i] << " -> " << recallm::stem(words[i]) << ", want " << expected[i];
    }
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(Porter, ClassicExamples) {
  EXPECT_EQ(recallm::stem("caresses"), "caress");
  EXPECT_EQ(recallm::stem("ponies"), "poni");
  EXPECT_EQ(recallm::stem("relational"), "relat");
  EXPECT_EQ(recallm::stem("hopping"), "hop");
  EXPECT_EQ(recallm::stem("generalization"), "gener");
  EXPECT_EQ(recallm::stem("electrical"), "electr");
}

TEST(Porter, ReferenceVariantRules) {
  // Step 2 of the reference code maps -bli to -ble and -logi to -log.
  EXPECT_EQ(recallm::stem("possibly"), "possibl");
  EXPECT_EQ(recallm::stem("terribly"), "terribl");
  EXPECT_EQ(recallm::stem("apology"), "apolog");
}

TEST(Porter, ShortWordsUnchanged) {
  EXPECT_EQ(recallm::stem("as"), "as");
  EXPECT_EQ(recallm::stem("is"), "is");
  EXPECT_EQ(recallm::stem("us"), "us");
  EXPECT_EQ(recallm::stem("a"), "a");
  EXPECT_EQ(recallm::stem(""), "");
}

TEST(Porter, Lowercases) {
  EXPECT_EQ(recallm::stem("Brandon"), "brandon");
  EXPECT_EQ(recallm::stem("HIKING"), "hike");
}
