// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sonneteer/common.hpp"
#include "sonneteer/lm.hpp"
#include "sonneteer/meter.hpp"
#include "sonneteer/phonetics.hpp"
#include "sonneteer/sketch.hpp"

namespace sonneteer::decoder {

struct DecodeParams {
  lm::SamplerParams sampler;
  int samples_per_step = 10;  // N of the token-level sampler
  int beam_width = 8;
  int retry_budget = 8;  // full restarts before the relaxation ladder
};

struct LineResult {
  std::vector<std::string> words;  // reading order, ends with the rhyme word
  meter::TemplateKind matched;
  double logprob = 0.0;
  bool relaxed = false;
  std::vector<std::string> dropped_words;  // content words given up on
};

struct Sonnet {
  std::string title;
  std::string scheme;
  std::array<LineResult, sketch::kLineCount> lines;
  uint64_t seed = 0;
};

/// No-repeat n-gram state across the poem. Trigrams never span lines; the set
/// of seen trigrams accumulates over the whole poem.
class PoemState {
 public:
  explicit PoemState(int ngram_size) : size_(ngram_size) {}

  void add_line(const std::vector<std::string>& words);
  int ngram_size() const { return size_; }
  const std::vector<std::vector<std::string>>& lines() const { return lines_; }

  /// Words w such that the reading-order n-gram (w, next...) already exists,
  /// given the `following` words that will sit immediately right of w.
  std::vector<std::string> forbidden_before(
      const std::vector<std::string>& following) const;
  bool seen(const std::vector<std::string>& ngram) const;

 private:
  int size_;
  std::vector<std::vector<std::string>> lines_;
  std::set<std::vector<std::string>> ngrams_;
};

/// Builds one line right-to-left from its sketch: beams seeded with the rhyme
/// word per viable template, candidate extensions are N top-k samples plus the
/// outstanding content words, candidates failing the template slots from the
/// right are pruned, fixed phrases are emitted atomically. Relaxation ladder
/// on persistent failure: doubled width and N, then content words dropped
/// worst-ranked first, then LineError.
LineResult generate_line(const sketch::LineSketch& ls, const PoemState& poem,
                         const lm::LanguageModel& model,
                         const phonetics::PronunciationLexicon& lex,
                         const DecodeParams& params, RandomSource& rng);

/// Lines 1..14 in order via generate_line, sharing a poem-level no-repeat
/// state. The sketch must be fully rhyme-assigned.
Sonnet generate_sonnet(const sketch::Sketch& sk,
                       const meter::RhymeScheme& scheme,
                       const lm::LanguageModel& model,
                       const phonetics::PronunciationLexicon& lex,
                       const DecodeParams& params, RandomSource& rng);

/// Exhaustive-search hook: every lexicon word is a candidate at every step and
/// no beam is discarded, so the result is the full set of lines reachable
/// through the pruner. Used to verify the pruner against brute-force oracles.
std::set<std::pair<meter::TemplateKind, std::vector<std::string>>>
reachable_lines(const sketch::LineSketch& ls, const PoemState& poem,
                const lm::LanguageModel& model,
                const phonetics::PronunciationLexicon& lex,
                const std::vector<meter::TemplateKind>& templates);

/// Plain-text rendering: stanza blocks per the scheme's preset layout.
std::string to_text(const Sonnet& s, const meter::RhymeScheme& scheme);

}  // namespace sonneteer::decoder
