// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sonneteer/common.hpp"
#include "sonneteer/lm.hpp"
#include "sonneteer/meter.hpp"
#include "sonneteer/phonetics.hpp"
#include "sonneteer/sketch.hpp"

namespace sonneteer::rhyme {

enum class Provenance { Initial, Sampled, Fallback };
std::string_view to_string(Provenance p);

struct RhymeAssignment {
  std::array<std::string, sketch::kLineCount> words;
  std::array<Provenance, sketch::kLineCount> provenance;
  /// Candidate pool consulted per scheme letter (diagnostics).
  std::map<char, std::vector<std::string>> candidates_used;
};

/// Restriction of `dist` to `candidates`: P'(w) = p(w) / sum over candidates,
/// zero elsewhere. Throws SamplingError when every candidate has zero mass
/// (callers fall back to uniform over the candidates).
lm::NextWordDistribution renormalize(const lm::NextWordDistribution& dist,
                                     const std::vector<lm::WordId>& candidates);

struct AssignResult {
  sketch::Sketch sketch;
  RhymeAssignment assignment;
};

/// Fills every rhyme slot of the sketch. Initial rhyming lines take their
/// last planned keyword (fallback chain: K3, K2, K1, then an LM-sampled word
/// when the line has no usable keyword); partner lines sample from the
/// renormalized distribution over the initial word's rhyme candidates,
/// restricted to words that can end a line and that rhyme with every word
/// already chosen for the letter. Stopwords, when given, are kept out of
/// line-final position. Throws AssignmentError naming the line when the
/// chain is exhausted.
AssignResult assign_rhymes(const sketch::Sketch& sk,
                           const meter::RhymeScheme& scheme,
                           const phonetics::PronunciationLexicon& lex,
                           const phonetics::RhymeIndex& index,
                           const lm::LanguageModel& model,
                           const lm::SamplerParams& params, RandomSource& rng,
                           const text::Stopwords* avoid = nullptr);

}  // namespace sonneteer::rhyme
