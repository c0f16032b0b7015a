// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sonneteer::eval {

/// Diagnostic for one same-letter line pair of the rhyme scheme.
struct PairDiag {
  int line_a = 0;  // 1-based
  int line_b = 0;
  char letter = '?';
  std::string word_a;
  std::string word_b;
  bool ok = false;
  std::string kind;  // "strict", "slant", "none", "unknown-word", "identical"
};

struct LineDiag {
  int line = 0;  // 1-based
  bool meter_ok = false;
  std::string matched_template;  // empty when unscannable
  bool syllable_ok = false;
  std::vector<std::string> unknown_words;
};

/// Rhyme / meter / syllable compliance percentages with the counts they were
/// computed from, so the numbers can always be re-derived from diagnostics.
struct FormatReport {
  double rhyme_pct = 0.0;
  double meter_pct = 0.0;
  double syllable_pct = 0.0;
  int rhyme_ok = 0;
  int rhyme_total = 0;
  int meter_ok = 0;
  int syllable_ok = 0;
  int line_count = 0;
  std::vector<PairDiag> pairs;
  std::vector<LineDiag> lines;
};

struct NoveltyReport {
  double distinct2 = 0.0;  // ratio in [0, 1]
  int bigrams_unique = 0;
  int bigrams_total = 0;
  double imageability = 0.0;
  int imageability_tokens = 0;  // tokens that contributed to the mean
};

}  // namespace sonneteer::eval
