#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "recallm/types.hpp"

namespace recallm {

struct Sentence {
  std::string text;
  std::size_t index = 0;

  bool operator==(const Sentence&) const = default;
};

// Splits on '.', '!' or '?' followed by whitespace or end of text. A period
// that ends a known abbreviation ("Mr.", "e.g.") does not end a sentence.
// Sentences are trimmed; empty ones are dropped.
std::vector<Sentence> split_sentences(std::string_view text);

// Whitespace tokenization with surrounding punctuation stripped. Internal
// hyphens and apostrophes are kept.
std::vector<std::string> tokenize(std::string_view sentence);

// Removes a trailing possessive "'s" or "'".
std::string strip_possessive(std::string_view token);

// Porter stemmer, reference-implementation variant. Lowercases first; words
// of length <= 2 are returned unchanged.
std::string stem(std::string_view word);

struct TokenOccurrence {
  std::string token;           // surface form, possessive stripped
  std::size_t position = 0;    // token index within the sentence
  std::size_t sentence = 0;    // Sentence::index

  bool operator==(const TokenOccurrence&) const = default;
};

// Plain-text word list: one lowercase token per line, '#' starts a comment.
class Lexicon {
 public:
  Lexicon() = default;
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

class NounTagger {
 public:
  virtual ~NounTagger() = default;
  virtual std::vector<TokenOccurrence> tag(const Sentence& sentence) const = 0;
};

// Deterministic noun identification. A token is a noun when
//   (a) it is capitalized and not sentence-initial,
//   (b) it is sentence-initial, capitalized and not excluded, or
//   (c) it is lowercase, not excluded, and either carries a noun suffix or
//       shares its Porter stem with an entry of the common-noun lexicon.
class RuleTagger final : public NounTagger {
 public:
  // Uses the bundled lexicons.
  RuleTagger();
  RuleTagger(Lexicon exclusions, Lexicon nouns);

  std::vector<TokenOccurrence> tag(const Sentence& sentence) const override;
  bool is_noun(std::string_view token, bool sentence_initial) const;

  static const RuleTagger& bundled();

 private:
  Lexicon exclusions_;
  std::unordered_set<std::string> noun_stems_;
};

std::vector<TokenOccurrence> tag_nouns(const Sentence& sentence,
                                       const NounTagger& tagger = RuleTagger::bundled());

struct ConceptEntry {
  std::string context;                     // containing sentences, source order
  std::vector<std::size_t> sentences;      // indices backing the context
  std::vector<std::size_t> occurrences;    // positions in ConceptBatch::sequence

  bool operator==(const ConceptEntry&) const = default;
};

// The concepts extracted from one text, merged by label.
struct ConceptBatch {
  std::map<std::string, ConceptEntry> concepts;
  std::set<EdgeKey> relations;
  std::vector<std::string> sequence;

  bool empty() const { return concepts.empty(); }
  bool operator==(const ConceptBatch&) const = default;
};

ConceptBatch extract_concepts(std::string_view text,
                              const NounTagger& tagger = RuleTagger::bundled());

// Stemmed noun labels in first-occurrence order, without duplicates.
std::vector<std::string> concept_labels(std::string_view text,
                                        const NounTagger& tagger = RuleTagger::bundled());

}  // namespace recallm
