// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/rhyme.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace sonneteer::rhyme {

namespace {

using phonetics::RhymeKind;

/// Candidate pool for a letter: rhyme candidates of the initial word that can
/// themselves end a line. Plain alphabetic words only, so dictionary oddities
/// ("d'artagnan") never reach line-final position.
struct CandidatePool {
  std::vector<std::string> words;
  // Pronunciations fetched once; the mutual-rhyme filter is pair-heavy.
  std::vector<const std::vector<phonetics::Pronunciation>*> prons;
};

CandidatePool usable_candidates(const std::string& initial,
                                const phonetics::RhymeIndex& index,
                                const phonetics::PronunciationLexicon& lex,
                                const text::Stopwords* avoid) {
  CandidatePool pool;
  for (auto& w : index.candidates(initial)) {
    if (w.find_first_not_of("abcdefghijklmnopqrstuvwxyz") != std::string::npos)
      continue;
    if (avoid && avoid->contains(w)) continue;
    const auto& prons = lex.lookup(w);
    if (!meter::viable_line_ending(prons)) continue;
    pool.words.push_back(std::move(w));
    pool.prons.push_back(&prons);
  }
  return pool;
}

/// Reverse context for partner-line sampling: the line-end marker followed by
/// the line's content words in reverse. This is the pluggable-context hook; a
/// stronger model may condition on more.
std::vector<lm::WordId> partner_context(const sketch::LineSketch& line,
                                        const lm::Vocabulary& vocab) {
  std::vector<lm::WordId> ctx{lm::Vocabulary::kLineEnd};
  for (auto it = line.content_words.rbegin(); it != line.content_words.rend();
       ++it)
    ctx.push_back(vocab.get(*it));
  return ctx;
}

struct PartnerPick {
  std::string word;
  Provenance prov;
};

/// One partner word: sample from the model distribution renormalized over
/// the usable set, uniform fallback when every candidate has zero mass.
PartnerPick pick_partner(const std::vector<std::string>& usable,
                         const sketch::LineSketch& partner_line,
                         const lm::LanguageModel& model, RandomSource& rng) {
  std::vector<lm::WordId> vocab_ids;
  std::vector<std::string> vocab_words;
  for (const auto& w : usable) {
    lm::WordId id = model.vocab().get(w);
    if (id == lm::Vocabulary::kUnk) continue;
    vocab_ids.push_back(id);
    vocab_words.push_back(w);
  }
  if (!vocab_ids.empty()) {
    auto dist =
        model.next_distribution(partner_context(partner_line, model.vocab()));
    double mass = 0.0;
    for (lm::WordId id : vocab_ids) mass += dist.prob(id);
    if (mass > 0.0) {
      auto renorm = renormalize(dist, vocab_ids);
      double u = rng.next_double();
      double acc = 0.0;
      for (size_t k = 0; k < vocab_ids.size(); ++k) {
        acc += renorm.prob(vocab_ids[k]);
        if (u < acc) return {vocab_words[k], Provenance::Sampled};
      }
      return {vocab_words.back(), Provenance::Sampled};
    }
  }
  return {usable[rng.uniform(usable.size())], Provenance::Fallback};
}

struct LetterAssignment {
  std::vector<std::string> words;      // one per partner line, in order
  std::vector<Provenance> provenance;
};

/// Tries to assign every partner of one letter from the pool, keeping the
/// chosen words mutually rhyming and distinct. Empty result means exhaustion.
std::optional<LetterAssignment> try_letter(
    const std::string& initial, const CandidatePool& pool,
    const std::vector<const sketch::LineSketch*>& partner_lines,
    const phonetics::PronunciationLexicon& lex, const lm::LanguageModel& model,
    RandomSource& rng) {
  LetterAssignment out;
  std::vector<std::string> chosen{initial};
  std::vector<const std::vector<phonetics::Pronunciation>*> chosen_prons{
      &lex.lookup(initial)};
  for (const auto* partner_line : partner_lines) {
    std::vector<std::string> usable;
    std::vector<const std::vector<phonetics::Pronunciation>*> usable_prons;
    for (size_t i = 0; i < pool.words.size(); ++i) {
      const auto& w = pool.words[i];
      if (std::find(chosen.begin(), chosen.end(), w) != chosen.end()) continue;
      bool ok = true;
      for (const auto* c : chosen_prons) {
        if (phonetics::classify_rhyme(*pool.prons[i], *c) == RhymeKind::None) {
          ok = false;
          break;
        }
      }
      if (ok) {
        usable.push_back(w);
        usable_prons.push_back(pool.prons[i]);
      }
    }
    if (usable.empty()) return std::nullopt;
    PartnerPick pick = pick_partner(usable, *partner_line, model, rng);
    for (size_t i = 0; i < usable.size(); ++i) {
      if (usable[i] == pick.word) {
        chosen_prons.push_back(usable_prons[i]);
        break;
      }
    }
    chosen.push_back(pick.word);
    out.words.push_back(pick.word);
    out.provenance.push_back(pick.prov);
  }
  return out;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Initial: return "initial";
    case Provenance::Sampled: return "sampled";
    default: return "fallback";
  }
}

lm::NextWordDistribution renormalize(const lm::NextWordDistribution& dist,
                                     const std::vector<lm::WordId>& candidates) {
  if (candidates.empty())
    throw ValidationError("renormalize: empty candidate set");
  double mass = 0.0;
  for (lm::WordId id : candidates) mass += dist.prob(id);
  if (mass <= 0.0)
    throw SamplingError("renormalize: no candidate carries probability mass");
  lm::NextWordDistribution out;
  out.probs.assign(dist.probs.size(), 0.0);
  for (lm::WordId id : candidates)
    out.probs[static_cast<size_t>(id)] = dist.prob(id) / mass;
  return out;
}

AssignResult assign_rhymes(const sketch::Sketch& sk,
                           const meter::RhymeScheme& scheme,
                           const phonetics::PronunciationLexicon& lex,
                           const phonetics::RhymeIndex& index,
                           const lm::LanguageModel& model,
                           const lm::SamplerParams& params, RandomSource& rng,
                           const text::Stopwords* avoid) {
  AssignResult result;
  result.sketch = sk;
  const auto& letters = scheme.letters();

  for (int line_no : meter::initial_rhyme_lines(scheme)) {
    const size_t li = static_cast<size_t>(line_no - 1);
    auto& line = result.sketch.lines[li];
    const char letter = letters[li];

    std::vector<size_t> partners;
    for (size_t j = 0; j < letters.size(); ++j) {
      if (letters[j] == letter && j != li) partners.push_back(j);
    }
    std::vector<const sketch::LineSketch*> partner_lines;
    for (size_t pj : partners)
      partner_lines.push_back(&result.sketch.lines[pj]);

    // Fallback chain for the initial rhyme word: last planned keyword first,
    // then the earlier keywords, then LM-sampled seeds. Each choice gets a
    // few sampling attempts before the chain moves on.
    std::string initial_word;
    Provenance initial_prov = Provenance::Initial;
    std::optional<LetterAssignment> assigned;
    std::vector<std::string> pool_used;

    auto attempt = [&](const std::string& w, Provenance prov) -> bool {
      if (!lex.contains(w) || !meter::viable_line_ending(w, lex)) return false;
      auto pool = usable_candidates(w, index, lex, avoid);
      if (pool.words.size() < partners.size()) return false;
      for (int tries = 0; tries < 4; ++tries) {
        auto got = try_letter(w, pool, partner_lines, lex, model, rng);
        if (got) {
          initial_word = w;
          initial_prov = prov;
          assigned = std::move(got);
          pool_used = std::move(pool.words);
          return true;
        }
      }
      return false;
    };

    bool done = false;
    const auto& kws = line.content_words;
    for (size_t ki = kws.size(); ki-- > 0 && !done;) {
      Provenance prov = (ki + 1 == kws.size()) ? Provenance::Initial
                                               : Provenance::Fallback;
      done = attempt(kws[ki], prov);
    }
    if (!done) {
      // No usable keyword (or none planned): seed from the model's line-end
      // distribution.
      std::vector<lm::WordId> ctx{lm::Vocabulary::kLineEnd};
      auto dist = model.next_distribution(ctx);
      std::unordered_set<lm::WordId> tried;
      for (int i = 0; i < 200 && !done; ++i) {
        lm::WordId id;
        try {
          id = lm::topk_sample(dist, model.vocab(), params, tried, rng);
        } catch (const SamplingError&) {
          break;
        }
        tried.insert(id);
        const std::string& w = model.vocab().word(id);
        if (avoid && avoid->contains(w)) continue;
        done = attempt(w, Provenance::Sampled);
      }
    }
    if (!done)
      throw AssignmentError("line " + std::to_string(line_no) +
                            ": no usable initial rhyme word (letter '" +
                            std::string(1, letter) + "')");

    // Commit: the chosen keyword moves out of the content slots.
    auto found = std::find(line.content_words.begin(),
                           line.content_words.end(), initial_word);
    if (found != line.content_words.end()) line.content_words.erase(found);
    line.rhyme_word = initial_word;
    line.rhyme_provenance = to_string(initial_prov);
    result.assignment.words[li] = initial_word;
    result.assignment.provenance[li] = initial_prov;
    result.assignment.candidates_used[letter] = pool_used;

    for (size_t p = 0; p < partners.size(); ++p) {
      auto& partner_line = result.sketch.lines[partners[p]];
      partner_line.rhyme_word = assigned->words[p];
      partner_line.rhyme_provenance = to_string(assigned->provenance[p]);
      result.assignment.words[partners[p]] = assigned->words[p];
      result.assignment.provenance[partners[p]] = assigned->provenance[p];
    }
  }
  return result;
}

}  // namespace sonneteer::rhyme
