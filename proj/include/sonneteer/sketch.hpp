// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sonneteer/common.hpp"
#include "sonneteer/meter.hpp"
#include "sonneteer/phonetics.hpp"
#include "sonneteer/text.hpp"

namespace sonneteer::sketch {

constexpr int kLineCount = 14;

/// A figurative phrase that must be emitted verbatim by the decoder. It
/// replaces the content-word slot it is anchored to.
struct FixedPhrase {
  std::vector<std::string> words;  // reading order, e.g. {"bright","like","diamond"}
  int anchor = 0;                  // index into the owning line's content_words

  bool operator==(const FixedPhrase&) const = default;
};

struct LineSketch {
  std::vector<std::string> content_words;
  std::string rhyme_word;  // empty until rhyme assignment
  std::vector<FixedPhrase> fixed_phrases;
  std::string rhyme_provenance;  // "", "initial", "sampled", "fallback"

  bool operator==(const LineSketch&) const = default;
};

struct Sketch {
  std::string title;
  std::array<LineSketch, kLineCount> lines;

  bool operator==(const Sketch&) const = default;
};

/// Keyword slot counts for a scheme: 3 on initial rhyming lines, 2 elsewhere.
std::array<int, kLineCount> slot_counts(const meter::RhymeScheme& scheme);

/// Checks the slot layout. With `before_rhyme` the rhyme words must be empty
/// and initial lines carry 3 content words; afterwards every line carries a
/// rhyme word and 2 content words. Throws ValidationError on violation.
void validate_layout(const Sketch& sk, const meter::RhymeScheme& scheme,
                     bool before_rhyme);

/// Deterministic JSON serialization (lossless round-trip).
std::string to_json(const Sketch& sk);
Sketch from_json(std::string_view json_text);
void save_json(const Sketch& sk, const std::filesystem::path& path);
Sketch load_json(const std::filesystem::path& path);

/// RAKE keyword extraction: candidate phrases are maximal stopword- and
/// punctuation-free token runs, scored document-wide; each word scores
/// degree/frequency. Returns the top 3 single words per line (fewer when the
/// line has fewer scorable words), ties broken by first document occurrence.
std::vector<std::vector<std::string>> extract_keywords(
    const std::vector<std::string>& lines, const text::Stopwords& stop);

/// Full per-line rankings plus the document-wide ranking; the planner
/// backfills from these when a line is short of keywords.
struct RakeRanking {
  std::vector<std::vector<std::string>> per_line;  // ranked, all words
  std::vector<std::string> document;               // ranked, all words
};
RakeRanking rake_ranking(const std::vector<std::string>& lines,
                         const text::Stopwords& stop);

/// Masked prompt, bit-exact grammar:
///   Title: {title} . ||| Line 1: [MASK] [MASK] [MASK] ||| Line 2: ... |||
/// Counts must each be 2 or 3.
std::string serialize_masked_prompt(std::string_view title,
                                    const std::array<int, kLineCount>& counts);
struct MaskedPrompt {
  std::string title;
  std::array<int, kLineCount> counts;
};
MaskedPrompt parse_masked_prompt(std::string_view text);

/// Keyword output uses the same grammar with words in place of [MASK]:
///   Line 1: autumn leaves fall ||| Line 2: cold wind ||| ...
std::string serialize_keyword_output(
    const std::array<std::vector<std::string>, kLineCount>& keywords);
std::array<std::vector<std::string>, kLineCount> parse_keyword_output(
    std::string_view body);
/// Variant that also enforces per-line counts, erroring with the line number.
std::array<std::vector<std::string>, kLineCount> parse_keyword_output(
    std::string_view body, const std::array<int, kLineCount>& expected);

/// Planner contract: given a title and per-line slot counts, produce exactly
/// that many keywords per line.
class KeywordPlanner {
 public:
  virtual ~KeywordPlanner() = default;
  virtual std::array<std::vector<std::string>, kLineCount> plan(
      std::string_view title, const std::array<int, kLineCount>& counts) = 0;
};

/// Reference planner: retrieves the corpus document with the highest
/// title-token overlap (earliest on ties), extracts RAKE keywords from its
/// first 14 lines (cycling shorter documents), keeps only lexicon words and
/// backfills from the next-ranked words.
class RetrievalPlanner final : public KeywordPlanner {
 public:
  RetrievalPlanner(const text::Corpus& corpus,
                   const phonetics::PronunciationLexicon& lex,
                   const text::Stopwords& stop);
  std::array<std::vector<std::string>, kLineCount> plan(
      std::string_view title, const std::array<int, kLineCount>& counts) override;

 private:
  const text::Corpus* corpus_;
  const phonetics::PronunciationLexicon* lex_;
  const text::Stopwords* stop_;
};

/// Runs a KeywordPlanner and assembles the sketch for the scheme.
Sketch plan_with(KeywordPlanner& planner, std::string_view title,
                 const meter::RhymeScheme& scheme);

/// plan_with over the reference RetrievalPlanner.
Sketch plan_reference(std::string_view title,
                      const phonetics::PronunciationLexicon& lex,
                      const text::Corpus& corpus, const text::Stopwords& stop,
                      const meter::RhymeScheme& scheme);

}  // namespace sonneteer::sketch
