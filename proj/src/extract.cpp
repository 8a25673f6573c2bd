#include "recallm/extract.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "recallm/assets.hpp"
#include "recallm/error.hpp"

namespace recallm {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Lowercase, period-free spellings of abbreviations that do not end a sentence.
constexpr std::array<std::string_view, 12> kAbbreviations{
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "e.g", "i.e", "cf"};

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with_abbreviation(std::string_view text, std::size_t period) {
  std::size_t begin = period;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  std::string word = lowercase(text.substr(begin, period - begin));
  while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.front()))) {
    word.erase(word.begin());
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Maps U+2019 (right single quotation mark) to an ASCII apostrophe.
std::string normalize_apostrophes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 && static_cast<unsigned char>(s[i + 2]) == 0x99) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) != 0;
}

constexpr std::array<std::string_view, 10> kNounSuffixes{
    "tion", "ment", "ness", "ity", "er", "or", "ism", "ist", "ance", "ence"};

bool has_noun_suffix(std::string_view word) {
  for (auto suffix : kNounSuffixes) {
    if (word.size() >= suffix.size() + 3 && word.ends_with(suffix)) return true;
  }
  return false;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    std::string s = collapse_whitespace(text.substr(begin, end - begin));
    if (!s.empty()) out.push_back(Sentence{std::move(s), out.size()});
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_terminator(text[end])) ++end;
    while (end < text.size() && is_closer(text[end])) ++end;
    bool at_boundary = end == text.size() || is_space(text[end]);
    bool abbreviation = text[i] == '.' && end == i + 1 && ends_with_abbreviation(text, i);
    if (at_boundary && !abbreviation) {
      emit(start, end);
      start = end;
    }
    i = end;
  }
  emit(start, text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string normalized = normalize_apostrophes(sentence);
  std::istringstream in(normalized);
  std::string raw;
  while (in >> raw) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && is_ascii_punct(raw[b])) ++b;
    while (e > b && is_ascii_punct(raw[e - 1])) --e;
    if (b < e) tokens.push_back(raw.substr(b, e - b));
  }
  return tokens;
}

std::string strip_possessive(std::string_view token) {
  if (token.size() > 2 && token[token.size() - 2] == '\'' &&
      (token.back() == 's' || token.back() == 'S')) {
    return std::string(token.substr(0, token.size() - 2));
  }
  if (token.size() > 1 && token.back() == '\'') return std::string(token.substr(0, token.size() - 1));
  return std::string(token);
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    lex.words_.insert(lowercase(std::string_view(line).substr(b, e - b + 1)));
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

RuleTagger::RuleTagger()
    : RuleTagger(Lexicon::parse(asset("lexicon/exclusions.txt")),
                 Lexicon::parse(asset("lexicon/nouns.txt"))) {}

RuleTagger::RuleTagger(Lexicon exclusions, Lexicon nouns) : exclusions_(std::move(exclusions)) {
  for (const auto& word : nouns.words()) noun_stems_.insert(stem(word));
}

const RuleTagger& RuleTagger::bundled() {
  static const RuleTagger tagger;
  return tagger;
}

bool RuleTagger::is_noun(std::string_view token, bool sentence_initial) const {
  if (token.empty()) return false;
  auto first = static_cast<unsigned char>(token.front());
  if (first < 0x80 && !std::isalpha(first)) return false;
  std::string lower = lowercase(token);
  if (std::isupper(first)) {
    if (!sentence_initial) return lower != "i";
    return !exclusions_.contains(lower);
  }
  if (exclusions_.contains(lower)) return false;
  if (has_noun_suffix(lower)) return true;
  return noun_stems_.count(stem(lower)) > 0;
}

std::vector<TokenOccurrence> RuleTagger::tag(const Sentence& sentence) const {
  std::vector<TokenOccurrence> nouns;
  auto tokens = tokenize(sentence.text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string token = strip_possessive(tokens[i]);
    if (is_noun(token, i == 0)) nouns.push_back(TokenOccurrence{std::move(token), i, sentence.index});
  }
  return nouns;
}

std::vector<TokenOccurrence> tag_nouns(const Sentence& sentence, const NounTagger& tagger) {
  return tagger.tag(sentence);
}

ConceptBatch extract_concepts(std::string_view text, const NounTagger& tagger) {
  ConceptBatch batch;
  for (const auto& sentence : split_sentences(text)) {
    for (const auto& occ : tagger.tag(sentence)) {
      std::string label = stem(occ.token);
      if (label.empty()) continue;
      auto& entry = batch.concepts[label];
      entry.occurrences.push_back(batch.sequence.size());
      if (entry.sentences.empty() || entry.sentences.back() != sentence.index) {
        if (!entry.context.empty()) entry.context.push_back(' ');
        entry.context += sentence.text;
        entry.sentences.push_back(sentence.index);
      }
      batch.sequence.push_back(std::move(label));
    }
  }
  for (std::size_t i = 1; i < batch.sequence.size(); ++i) {
    if (batch.sequence[i] != batch.sequence[i - 1]) {
      batch.relations.insert(EdgeKey::make(batch.sequence[i - 1], batch.sequence[i]));
    }
  }
  return batch;
}

std::vector<std::string> concept_labels(std::string_view text, const NounTagger& tagger) {
  std::vector<std::string> labels;
  for (const auto& sentence : split_sentences(text)) {
    for (const auto& occ : tagger.tag(sentence)) {
      std::string label = stem(occ.token);
      if (!label.empty() && std::find(labels.begin(), labels.end(), label) == labels.end()) {
        labels.push_back(std::move(label));
      }
    }
  }
  return labels;
}

}  // namespace recallm
