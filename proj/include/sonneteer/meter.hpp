// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sonneteer/phonetics.hpp"
#include "sonneteer/report.hpp"

namespace sonneteer::meter {

using phonetics::PronunciationLexicon;
using phonetics::StressMark;

enum class TemplateKind {
  Standard,          // (U S) x5
  InvertedFirstFoot, // (S U)(U S) x4
  Feminine,          // (U S) x5 U
};

std::string_view to_string(TemplateKind k);
std::optional<TemplateKind> template_from_string(std::string_view name);

struct StressTemplate {
  TemplateKind kind;
  std::string name;
  std::vector<StressMark> marks;  // only U / S

  size_t length() const { return marks.size(); }
};

/// The three admissible line templates, in fixed matching order:
/// standard, inverted_first_foot, feminine.
const std::vector<StressTemplate>& line_templates();

/// True when `pattern` (word stress marks, A matching either) covers `slots`
/// (template marks) position by position. Sizes must be equal.
bool pattern_matches(std::span<const StressMark> pattern,
                     std::span<const StressMark> slots);

/// First pronunciation of `word` whose stress pattern exactly fills `slots`.
/// Returns nullptr when none fits; throws LookupError for unknown words.
const phonetics::Pronunciation* word_fits(std::span<const StressMark> slots,
                                          std::string_view word,
                                          const PronunciationLexicon& lex);

/// True when some pronunciation of `word` can occupy the final slots of at
/// least one line template, i.e. the word can end a line.
bool viable_line_ending(std::string_view word, const PronunciationLexicon& lex);
bool viable_line_ending(const std::vector<phonetics::Pronunciation>& prons);

struct ScanResult {
  std::optional<TemplateKind> matched;
  /// Template slots consumed by each word, in order (empty when unmatched).
  std::vector<std::vector<StressMark>> word_slots;
  std::vector<std::string> unknown_words;
};

/// Scans a tokenized line against the templates in fixed order, backtracking
/// over pronunciation alternatives. Unscannable lines are a valid result.
ScanResult scan_line(const std::vector<std::string>& words,
                     const PronunciationLexicon& lex);

class RhymeScheme {
 public:
  /// Accepts a 14-letter uppercase string where every letter occurs at least
  /// twice, or the presets "shakespearean" / "petrarchan".
  static RhymeScheme parse(std::string_view spec);
  static RhymeScheme shakespearean();
  static RhymeScheme petrarchan();

  const std::string& letters() const { return letters_; }
  const std::string& name() const { return name_; }
  /// Stanza sizes for text layout; empty for schemes without a preset layout.
  const std::vector<int>& stanza_sizes() const { return stanza_sizes_; }

  /// All same-letter line pairs (1-based, a < b), in scheme order.
  std::vector<std::pair<int, int>> letter_pairs() const;

 private:
  std::string letters_;
  std::string name_;
  std::vector<int> stanza_sizes_;
};

/// 1-based indices of the first occurrence of each distinct scheme letter.
std::vector<int> initial_rhyme_lines(const RhymeScheme& scheme);

/// Format-checks a 14-line poem: rhyme% over all same-letter pairs, meter%
/// over lines scanning against some template, syllable% over lines that can
/// total 10 or 11 syllables. Lines are raw text and are tokenized here.
eval::FormatReport check_sonnet_format(const std::vector<std::string>& lines,
                                       const RhymeScheme& scheme,
                                       const PronunciationLexicon& lex);

}  // namespace sonneteer::meter
