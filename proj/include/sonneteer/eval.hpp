// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sonneteer/common.hpp"
#include "sonneteer/meter.hpp"
#include "sonneteer/report.hpp"
#include "sonneteer/text.hpp"

namespace sonneteer::eval {

/// word -> imageability rating. TSV rows: word<TAB>rating.
class ImageabilityLexicon {
 public:
  static ImageabilityLexicon load(std::istream& in);
  static ImageabilityLexicon load_file(const std::filesystem::path& path);

  void add(std::string_view word, double rating);
  std::optional<double> find(std::string_view word) const;
  size_t size() const { return ratings_.size(); }

 private:
  std::unordered_map<std::string, double> ratings_;
};

struct Distinct2Result {
  double ratio = 0.0;
  int unique = 0;
  int total = 0;
};

/// Unique / total adjacent-token bigrams; bigrams never cross line boundaries.
/// Throws MetricError when the poem has no bigram at all.
Distinct2Result distinct_2(const std::vector<std::string>& lines);

struct ImageabilityResult {
  double mean = 0.0;
  int scored_tokens = 0;
};

/// Mean rating over non-stopword tokens found in the lexicon. Throws
/// MetricError when nothing is scorable.
ImageabilityResult imageability(const std::vector<std::string>& lines,
                                const ImageabilityLexicon& img,
                                const text::Stopwords& stop);

struct PoemRow {
  std::string name;
  FormatReport format;
  NoveltyReport novelty;
  std::string error;  // nonempty when this poem could not be scored
};

struct BatchReport {
  std::vector<PoemRow> rows;
  // Macro-averages over rows without errors.
  double rhyme_pct = 0.0;
  double meter_pct = 0.0;
  double syllable_pct = 0.0;
  double distinct2 = 0.0;      // x100 for table comparability
  double imageability = 0.0;
  int scored_poems = 0;
};

enum class Execution { Serial, Parallel };

/// Scores each poem (format + novelty) and macro-averages. Per-poem errors
/// become flagged rows, never aborts. Rows are independent; the parallel path
/// and the serial path must agree exactly.
BatchReport batch_report(
    const std::vector<std::vector<std::string>>& poems,
    const std::vector<std::string>& names, const meter::RhymeScheme& scheme,
    const phonetics::PronunciationLexicon& lex, const ImageabilityLexicon& img,
    const text::Stopwords& stop, Execution mode = Execution::Parallel);

std::string render_table(const BatchReport& report);

}  // namespace sonneteer::eval
