#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "recallm/extract.hpp"

using namespace recallm;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

std::vector<std::string> tokens_of(const std::vector<TokenOccurrence>& occurrences) {
  std::vector<std::string> out;
  for (const auto& o : occurrences) out.push_back(o.token);
  return out;
}

}  // namespace

TEST(SplitSentences, EmptyInput) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("   \n\t ").empty());
}

TEST(SplitSentences, TerminatorsFollowedBySpace) {
  auto out = split_sentences("A b. C d?");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], (Sentence{"A b.", 0}));
  EXPECT_EQ(out[1], (Sentence{"C d?", 1}));
}

TEST(SplitSentences, FixtureStatementIsOneSentence) {
  auto out = split_sentences("Brandon is South African.");
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].text, "Brandon is South African.");
}

TEST(SplitSentences, ExclamationAndTrailingText) {
  EXPECT_EQ(texts(split_sentences("Stop! Go now")), (std::vector<std::string>{"Stop!", "Go now"}));
}

TEST(SplitSentences, PeriodInsideTokenDoesNotSplit) {
  EXPECT_EQ(texts(split_sentences("Version 2.5 is out. Done.")),
            (std::vector<std::string>{"Version 2.5 is out.", "Done."}));
}

TEST(SplitSentences, AbbreviationGuard) {
  EXPECT_EQ(texts(split_sentences("Mr. Smith met Dr. Jones. They talked, e.g. about tea.")),
            (std::vector<std::string>{"Mr. Smith met Dr. Jones.", "They talked, e.g. about tea."}));
}

TEST(SplitSentences, IndicesAreContiguous) {
  auto out = split_sentences("One. Two! Three? Four.");
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].index, i);
}

TEST(SplitSentences, WhitespaceTrimmedAndNewlinesSeparate) {
  EXPECT_EQ(texts(split_sentences("  First one.\n\nSecond one.  ")),
            (std::vector<std::string>{"First one.", "Second one."}));
}

TEST(Tokenize, StripsSurroundingPunctuationKeepsHyphens) {
  EXPECT_EQ(tokenize("Brandon broke his leg, when 10-years-old."),
            (std::vector<std::string>{"Brandon", "broke", "his", "leg", "when", "10-years-old"}));
}

TEST(Tokenize, DropsPurePunctuation) {
  EXPECT_EQ(tokenize("a -- b ... c"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(StripPossessive, Forms) {
  EXPECT_EQ(strip_possessive("Brandon's"), "Brandon");
  EXPECT_EQ(strip_possessive("brothers'"), "brothers");
  EXPECT_EQ(strip_possessive("Brandon"), "Brandon");
}

TEST(TagNouns, CapitalizedNames) {
  auto out = tag_nouns(Sentence{"Brandon works for Cisco.", 0});
  EXPECT_EQ(tokens_of(out), (std::vector<std::string>{"Brandon", "Cisco"}));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].position, 0u);
  EXPECT_EQ(out[1].position, 3u);
}

TEST(TagNouns, ClosedClassOnly) { EXPECT_TRUE(tag_nouns(Sentence{"is the", 0}).empty()); }

TEST(TagNouns, PossessiveAndLexiconNoun) {
  auto out = tokens_of(tag_nouns(Sentence{"Brandon's favorite color is green.", 0}));
  ASSERT_GE(out.size(), 2u);
  EXPECT_EQ(out[0], "Brandon");
  EXPECT_NE(std::find(out.begin(), out.end(), "color"), out.end());
}

TEST(TagNouns, SuffixRule) {
  RuleTagger tagger(Lexicon::parse("the\n"), Lexicon{});
  EXPECT_TRUE(tagger.is_noun("station", false));
  EXPECT_TRUE(tagger.is_noun("happiness", false));
  EXPECT_TRUE(tagger.is_noun("tourist", false));
  // Too short for the suffix to count.
  EXPECT_FALSE(tagger.is_noun("her", false));
  EXPECT_FALSE(tagger.is_noun("the", false));
}

TEST(TagNouns, SentenceInitialCapitalRespectsExclusions) {
  RuleTagger tagger(Lexicon::parse("# closed class\nthe\n"), Lexicon{});
  EXPECT_FALSE(tagger.is_noun("The", true));
  EXPECT_TRUE(tagger.is_noun("The", false));
  EXPECT_TRUE(tagger.is_noun("Paris", true));
  EXPECT_FALSE(tagger.is_noun("I", false));
}

TEST(TagNouns, LexiconMatchesByStem) {
  RuleTagger tagger(Lexicon{}, Lexicon::parse("sibling\n"));
  EXPECT_TRUE(tagger.is_noun("siblings", false));
  EXPECT_FALSE(tagger.is_noun("green", false));
}

TEST(Lexicon, ParseSkipsCommentsAndBlanks) {
  auto lex = Lexicon::parse("# header\n\ncolor\n  music  \n# tea\n");
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_TRUE(lex.contains("color"));
  EXPECT_TRUE(lex.contains("music"));
  EXPECT_FALSE(lex.contains("tea"));
}

TEST(ExtractConcepts, NounFreeTextIsEmpty) {
  auto batch = extract_concepts("is the");
  EXPECT_TRUE(batch.empty());
  EXPECT_TRUE(batch.relations.empty());
  EXPECT_TRUE(batch.sequence.empty());
}

TEST(ExtractConcepts, AdjacencyOnly) {
  auto batch = extract_concepts("Alpha Beta Gamma.");
  ASSERT_EQ(batch.sequence, (std::vector<std::string>{"alpha", "beta", "gamma"}));
  EXPECT_EQ(batch.relations, (std::set<EdgeKey>{EdgeKey::make("alpha", "beta"), EdgeKey::make("beta", "gamma")}));
}

TEST(ExtractConcepts, SelfPairsDropped) {
  auto batch = extract_concepts("Alpha Alpha Beta.");
  ASSERT_EQ(batch.sequence, (std::vector<std::string>{"alpha", "alpha", "beta"}));
  EXPECT_EQ(batch.relations, (std::set<EdgeKey>{EdgeKey::make("alpha", "beta")}));
  EXPECT_EQ(batch.concepts.at("alpha").occurrences, (std::vector<std::size_t>{0, 1}));
  // Both occurrences sit in the same sentence, which is recorded once.
  EXPECT_EQ(batch.concepts.at("alpha").context, "Alpha Alpha Beta.");
}

TEST(ExtractConcepts, ContextsInSourceOrder) {
  auto batch = extract_concepts("Brandon works for Cisco. Cisco pays Brandon.");
  const auto& brandon = batch.concepts.at(stem("Brandon"));
  EXPECT_EQ(brandon.context, "Brandon works for Cisco. Cisco pays Brandon.");
  EXPECT_EQ(brandon.sentences, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(batch.sequence, (std::vector<std::string>{"brandon", "cisco", "cisco", "brandon"}));
  EXPECT_EQ(batch.relations, (std::set<EdgeKey>{EdgeKey::make("brandon", "cisco")}));
}

TEST(ExtractConcepts, RelationsCrossSentenceBoundaries) {
  auto batch = extract_concepts("Brandon is tired. Carter is not.");
  EXPECT_EQ(batch.relations, (std::set<EdgeKey>{EdgeKey::make("brandon", "carter")}));
  EXPECT_EQ(batch.concepts.at("carter").context, "Carter is not.");
}

TEST(ExtractConcepts, PossessiveUnifiesWithName) {
  auto batch = extract_concepts("Brandon's favorite color is green. Brandon is tired.");
  EXPECT_EQ(batch.concepts.at("brandon").occurrences.size(), 2u);
  EXPECT_EQ(batch.concepts.at("brandon").context, "Brandon's favorite color is green. Brandon is tired.");
}

TEST(ExtractConcepts, Deterministic) {
  const char* text = "Carter is planning on travelling to Japan for his next vacation. Carter hates hiking.";
  EXPECT_EQ(extract_concepts(text), extract_concepts(text));
}

TEST(ConceptLabels, FirstOccurrenceOrderWithoutDuplicates) {
  EXPECT_EQ(concept_labels("Brandon works for Cisco. Cisco pays Brandon."),
            (std::vector<std::string>{"brandon", "cisco"}));
  EXPECT_EQ(concept_labels("What is Brandon's favorite color?"), (std::vector<std::string>{"brandon", "color"}));
  EXPECT_TRUE(concept_labels("Is it?").empty());
}
