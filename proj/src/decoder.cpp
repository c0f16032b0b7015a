// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

namespace sonneteer::decoder {

namespace {

using meter::StressTemplate;
using phonetics::Pronunciation;
using phonetics::StressMark;

constexpr double kLogFloor = -27.631021115928547;  // log(1e-12): forced words

/// One thing the line must contain: a single content word or a fixed phrase
/// (reading order). rank orders the relaxation ladder; lower = keep longer.
struct Requirement {
  std::vector<std::string> words;
  int rank = 0;
  bool is_phrase() const { return words.size() > 1; }
};

struct Beam {
  std::vector<std::string> tokens;  // reverse order: tokens[0] is line-final
  int consumed = 0;                 // template slots filled from the right
  uint32_t remaining = 0;           // bit per outstanding requirement
  double logprob = 0.0;
};

struct BeamKey {
  std::vector<std::string> tokens;
  int consumed;
  uint32_t remaining;
  bool operator<(const BeamKey& o) const {
    return std::tie(tokens, consumed, remaining) <
           std::tie(o.tokens, o.consumed, o.remaining);
  }
};

/// Beam expansion over one template. Shared by the sampling decoder and by
/// reachable_lines, which feeds every lexicon word through the same pruning.
class LineSearch {
 public:
  LineSearch(const StressTemplate& tpl, const std::vector<Requirement>& reqs,
             const std::string& rhyme_word, const PoemState& poem,
             const lm::LanguageModel& model,
             const phonetics::PronunciationLexicon& lex)
      : tpl_(tpl),
        reqs_(reqs),
        rhyme_word_(rhyme_word),
        poem_(poem),
        model_(model),
        lex_(lex),
        length_(static_cast<int>(tpl.length())) {
    full_mask_ = reqs_.empty() ? 0u : (1u << reqs_.size()) - 1u;
    build_placement_table();
  }

  std::vector<Beam> initial_beams() const {
    std::vector<Beam> beams;
    if (!lex_.contains(rhyme_word_)) return beams;
    std::vector<lm::WordId> ctx{lm::Vocabulary::kLineEnd};
    auto dist = model_.next_distribution(ctx);
    for (const auto& pron : lex_.lookup(rhyme_word_)) {
      int k = pron.syllable_count();
      if (k > length_) continue;
      if (!meter::pattern_matches(pron.stress, slots(length_ - k, k))) continue;
      Beam b;
      b.tokens = {rhyme_word_};
      b.consumed = k;
      b.remaining = full_mask_;
      b.logprob = word_logprob(dist, rhyme_word_);
      if (feasible(b)) beams.push_back(std::move(b));
    }
    return beams;
  }

  /// Expands `beam` with one candidate (plain word or requirement), appending
  /// the surviving extensions.
  void expand(const Beam& beam, int req_idx, const std::string& plain_word,
              const lm::NextWordDistribution& dist,
              std::vector<Beam>& out) const {
    if (req_idx < 0) {
      extend_word(beam, plain_word, dist, UINT32_MAX, out);
      return;
    }
    const Requirement& req = reqs_[static_cast<size_t>(req_idx)];
    uint32_t bit = 1u << req_idx;
    if (!(beam.remaining & bit)) return;
    if (!req.is_phrase()) {
      extend_word(beam, req.words[0], dist, bit, out);
      return;
    }
    // Fixed phrase: emitted atomically, rightmost word first, checked against
    // the template as one block.
    std::vector<Beam> stage{beam};
    stage[0].remaining &= ~bit;
    stage[0].logprob = beam.logprob;
    std::vector<Beam> next;
    bool first = true;
    for (auto it = req.words.rbegin(); it != req.words.rend(); ++it) {
      next.clear();
      for (const auto& b : stage) {
        lm::NextWordDistribution d =
            first ? dist : model_.next_distribution(context_ids(b));
        extend_word(b, *it, d, 0, next);
      }
      stage = std::move(next);
      first = false;
      if (stage.empty()) return;
    }
    for (auto& b : stage) out.push_back(std::move(b));
  }

  std::vector<lm::WordId> context_ids(const Beam& beam) const {
    std::vector<lm::WordId> ctx{lm::Vocabulary::kLineEnd};
    for (const auto& t : beam.tokens) ctx.push_back(model_.vocab().get(t));
    return ctx;
  }

  /// Sampler-facing forbidden set: words whose emission would recreate a seen
  /// n-gram in reading order.
  std::unordered_set<lm::WordId> forbidden_ids(const Beam& beam) const {
    std::unordered_set<lm::WordId> out;
    int size = poem_.ngram_size();
    if (size <= 0) return out;
    auto follow = following_of(beam, size);
    if (!follow) return out;
    for (const auto& w : poem_.forbidden_before(*follow)) {
      lm::WordId id = model_.vocab().get(w);
      if (id != lm::Vocabulary::kUnk) out.insert(id);
    }
    // Windows inside the beam itself.
    std::vector<std::string> reading(beam.tokens.rbegin(), beam.tokens.rend());
    for (size_t i = 0; i + static_cast<size_t>(size) <= reading.size(); ++i) {
      bool match = true;
      for (int j = 1; j < size; ++j) {
        if (reading[i + static_cast<size_t>(j)] !=
            (*follow)[static_cast<size_t>(j - 1)]) {
          match = false;
          break;
        }
      }
      if (match) {
        lm::WordId id = model_.vocab().get(reading[i]);
        if (id != lm::Vocabulary::kUnk) out.insert(id);
      }
    }
    return out;
  }

  bool completed(const Beam& b) const { return b.consumed == length_; }
  bool valid_completion(const Beam& b) const {
    return completed(b) && b.remaining == 0;
  }
  const StressTemplate& tpl() const { return tpl_; }

 private:
  std::span<const StressMark> slots(int start, int count) const {
    return {tpl_.marks.data() + start, static_cast<size_t>(count)};
  }

  double word_logprob(const lm::NextWordDistribution& dist,
                      const std::string& w) const {
    lm::WordId id = model_.vocab().get(w);
    double p = id == lm::Vocabulary::kUnk ? 0.0 : dist.prob(id);
    return p > 0.0 ? std::log(p) : kLogFloor;
  }

  /// The size-1 reading-order words that will follow a newly emitted word;
  /// nullopt when the beam is still too short for an n-gram.
  std::optional<std::vector<std::string>> following_of(const Beam& beam,
                                                       int size) const {
    if (static_cast<int>(beam.tokens.size()) < size - 1) return std::nullopt;
    std::vector<std::string> f;
    for (int j = 0; j < size - 1; ++j)
      f.push_back(beam.tokens[beam.tokens.size() - 1 - static_cast<size_t>(j)]);
    return f;
  }

  bool creates_repeat(const Beam& beam, const std::string& word) const {
    int size = poem_.ngram_size();
    if (size <= 0) return false;
    auto follow = following_of(beam, size);
    if (!follow) return false;
    std::vector<std::string> ngram{word};
    ngram.insert(ngram.end(), follow->begin(), follow->end());
    if (poem_.seen(ngram)) return true;
    std::vector<std::string> reading(beam.tokens.rbegin(), beam.tokens.rend());
    for (size_t i = 0; i + static_cast<size_t>(size) <= reading.size(); ++i) {
      if (std::equal(ngram.begin(), ngram.end(), reading.begin() + i))
        return true;
    }
    return false;
  }

  /// Core extension: place one word against the next unfilled slots from the
  /// right, branching over every fitting pronunciation. clear_bit == UINT32_MAX
  /// means "plain word" (still consumes a matching single-word requirement).
  void extend_word(const Beam& beam, const std::string& word,
                   const lm::NextWordDistribution& dist, uint32_t clear_bit,
                   std::vector<Beam>& out) const {
    if (!lex_.contains(word)) return;
    if (creates_repeat(beam, word)) return;

    uint32_t clear = 0;
    if (clear_bit == UINT32_MAX) {
      // A sampled word may incidentally satisfy a single-word requirement.
      for (size_t r = 0; r < reqs_.size(); ++r) {
        if ((beam.remaining >> r) & 1u) {
          if (!reqs_[r].is_phrase() && reqs_[r].words[0] == word) {
            clear = 1u << r;
            break;
          }
        }
      }
    } else {
      clear = clear_bit;
    }

    for (const auto& pron : lex_.lookup(word)) {
      int k = pron.syllable_count();
      if (beam.consumed + k > length_) continue;
      if (!meter::pattern_matches(pron.stress,
                                  slots(length_ - beam.consumed - k, k)))
        continue;
      Beam nb;
      nb.tokens = beam.tokens;
      nb.tokens.push_back(word);
      nb.consumed = beam.consumed + k;
      nb.remaining = beam.remaining & ~clear;
      nb.logprob = beam.logprob + word_logprob(dist, word);
      if (feasible(nb)) out.push_back(std::move(nb));
    }
  }

  /// Sound feasibility pruning: every outstanding requirement must still have
  /// a placement window in the unfilled prefix, and their minimal syllable
  /// totals must fit. Never prunes a completable state.
  bool feasible(const Beam& b) const {
    int room = length_ - b.consumed;
    int need = 0;
    for (size_t r = 0; r < reqs_.size(); ++r) {
      if (!((b.remaining >> r) & 1u)) continue;
      if (!placement_[r][static_cast<size_t>(room)]) return false;
      need += min_syllables_[r];
    }
    return need <= room;
  }

  void build_placement_table() {
    min_syllables_.resize(reqs_.size());
    placement_.resize(reqs_.size());
    for (size_t r = 0; r < reqs_.size(); ++r) {
      min_syllables_[r] = requirement_min_syllables(reqs_[r]);
      placement_[r].assign(static_cast<size_t>(length_) + 1, false);
      for (int room = 0; room <= length_; ++room)
        placement_[r][static_cast<size_t>(room)] =
            placeable_within(reqs_[r], room);
    }
  }

  int requirement_min_syllables(const Requirement& req) const {
    int total = 0;
    for (const auto& w : req.words) {
      int best = 1 << 20;
      if (lex_.contains(w)) {
        for (const auto& pron : lex_.lookup(w))
          best = std::min(best, pron.syllable_count());
      }
      total += best;
    }
    return total;
  }

  /// Whether the requirement's stress pattern fits somewhere in the first
  /// `room` template slots, for some pronunciation combination.
  bool placeable_within(const Requirement& req, int room) const {
    for (const auto& w : req.words)
      if (!lex_.contains(w)) return false;
    std::vector<StressMark> marks;
    auto dfs = [&](auto&& self, size_t wi) -> bool {
      if (wi == req.words.size()) {
        int k = static_cast<int>(marks.size());
        for (int off = 0; off + k <= room; ++off) {
          if (meter::pattern_matches(marks, slots(off, k))) return true;
        }
        return false;
      }
      for (const auto& pron : lex_.lookup(req.words[wi])) {
        size_t before = marks.size();
        marks.insert(marks.end(), pron.stress.begin(), pron.stress.end());
        if (static_cast<int>(marks.size()) <= room && self(self, wi + 1))
          return true;
        marks.resize(before);
        if (static_cast<int>(before) > room) return false;
      }
      return false;
    };
    return dfs(dfs, 0);
  }

  const StressTemplate& tpl_;
  const std::vector<Requirement>& reqs_;
  const std::string& rhyme_word_;
  const PoemState& poem_;
  const lm::LanguageModel& model_;
  const phonetics::PronunciationLexicon& lex_;
  int length_;
  uint32_t full_mask_ = 0;
  std::vector<int> min_syllables_;
  std::vector<std::vector<bool>> placement_;
};

std::vector<Requirement> build_requirements(const sketch::LineSketch& ls) {
  std::vector<Requirement> reqs;
  std::vector<bool> anchored(ls.content_words.size(), false);
  for (const auto& fp : ls.fixed_phrases) {
    if (fp.anchor < 0 || fp.anchor >= static_cast<int>(ls.content_words.size()))
      throw LineError("fixed phrase anchor out of range");
    anchored[static_cast<size_t>(fp.anchor)] = true;
    reqs.push_back({fp.words, fp.anchor});
  }
  for (size_t i = 0; i < ls.content_words.size(); ++i) {
    if (anchored[i]) continue;
    reqs.push_back({{ls.content_words[i]}, static_cast<int>(i)});
  }
  if (reqs.size() > 16) throw LineError("too many content requirements");
  return reqs;
}

struct AttemptResult {
  bool success = false;
  Beam best;
  const StressTemplate* tpl = nullptr;
};

/// One full beam-search attempt over all viable templates jointly.
AttemptResult run_attempt(const std::vector<LineSearch>& searches,
                          const lm::LanguageModel& model,
                          const phonetics::PronunciationLexicon& lex,
                          int beam_width, int samples, const DecodeParams& params,
                          RandomSource& rng) {
  struct Entry {
    size_t search;
    Beam beam;
  };
  AttemptResult result;
  auto better = [](const Beam& a, const Beam& b) {
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    return a.tokens < b.tokens;
  };

  std::vector<Entry> beams;
  for (size_t s = 0; s < searches.size(); ++s) {
    for (auto& b : searches[s].initial_beams()) {
      // A rhyme word may fill the template on its own.
      if (searches[s].valid_completion(b)) {
        if (!result.success || better(b, result.best)) {
          result.success = true;
          result.best = b;
          result.tpl = &searches[s].tpl();
        }
      } else if (!searches[s].completed(b)) {
        beams.push_back({s, std::move(b)});
      }
    }
  }
  if (result.success) return result;

  int guard = 0;
  while (!beams.empty() && guard++ < 16) {
    std::vector<Entry> expanded;
    std::vector<Entry> done;
    for (const auto& entry : beams) {
      const LineSearch& search = searches[entry.search];
      if (search.completed(entry.beam)) continue;

      auto dist = model.next_distribution(search.context_ids(entry.beam));
      auto forbidden = search.forbidden_ids(entry.beam);

      // Candidates: N top-k samples plus the outstanding requirements.
      std::vector<std::pair<int, std::string>> candidates;
      auto add_candidate = [&](int req, const std::string& w) {
        for (const auto& c : candidates)
          if (c.first == req && c.second == w) return;
        candidates.emplace_back(req, w);
      };
      for (size_t r = 0; r < 16; ++r) {
        if ((entry.beam.remaining >> r) & 1u)
          add_candidate(static_cast<int>(r), "");
      }
      for (int n = 0; n < samples; ++n) {
        lm::WordId id;
        try {
          id = lm::topk_sample(dist, model.vocab(), params.sampler, forbidden,
                               rng);
        } catch (const SamplingError&) {
          break;
        }
        add_candidate(-1, model.vocab().word(id));
      }

      std::vector<Beam> out;
      for (const auto& [req, word] : candidates)
        search.expand(entry.beam, req, word, dist, out);
      for (auto& nb : out) {
        if (search.completed(nb)) {
          if (search.valid_completion(nb))
            done.push_back({entry.search, std::move(nb)});
        } else {
          expanded.push_back({entry.search, std::move(nb)});
        }
      }
    }

    if (!done.empty()) {
      auto best = std::min_element(done.begin(), done.end(),
                                   [&](const Entry& a, const Entry& b) {
                                     return better(a.beam, b.beam);
                                   });
      result.success = true;
      result.best = best->beam;
      result.tpl = &searches[best->search].tpl();
      return result;
    }

    // Dedupe identical states keeping the best score, then trim to width.
    std::map<std::pair<size_t, BeamKey>, size_t> dedup;
    std::vector<Entry> unique;
    for (auto& e : expanded) {
      BeamKey key{e.beam.tokens, e.beam.consumed, e.beam.remaining};
      auto [it, inserted] =
          dedup.try_emplace({e.search, std::move(key)}, unique.size());
      if (inserted) {
        unique.push_back(std::move(e));
      } else if (e.beam.logprob > unique[it->second].beam.logprob) {
        unique[it->second] = std::move(e);
      }
    }
    std::sort(unique.begin(), unique.end(),
              [&](const Entry& a, const Entry& b) {
                return better(a.beam, b.beam);
              });
    if (static_cast<int>(unique.size()) > beam_width)
      unique.resize(static_cast<size_t>(beam_width));
    beams = std::move(unique);
  }
  return result;
}

}  // namespace

void PoemState::add_line(const std::vector<std::string>& words) {
  lines_.push_back(words);
  if (size_ <= 0) return;
  size_t n = static_cast<size_t>(size_);
  const auto& w = lines_.back();
  for (size_t i = 0; i + n <= w.size(); ++i) {
    std::vector<std::string> ngram(w.begin() + static_cast<long>(i),
                                   w.begin() + static_cast<long>(i + n));
    ngrams_.insert(ngram);
  }
}

bool PoemState::seen(const std::vector<std::string>& ngram) const {
  return ngrams_.count(ngram) > 0;
}

std::vector<std::string> PoemState::forbidden_before(
    const std::vector<std::string>& following) const {
  std::vector<std::string> out;
  for (const auto& ngram : ngrams_) {
    if (ngram.size() != following.size() + 1) continue;
    if (std::equal(following.begin(), following.end(), ngram.begin() + 1))
      out.push_back(ngram.front());
  }
  return out;
}

LineResult generate_line(const sketch::LineSketch& ls, const PoemState& poem,
                         const lm::LanguageModel& model,
                         const phonetics::PronunciationLexicon& lex,
                         const DecodeParams& params, RandomSource& rng) {
  if (ls.rhyme_word.empty())
    throw LineError("line sketch has no rhyme word");
  if (!lex.contains(ls.rhyme_word))
    throw LineError("rhyme word not in lexicon: " + ls.rhyme_word);
  for (const auto& w : ls.content_words) {
    if (!lex.contains(w)) throw LineError("content word not in lexicon: " + w);
  }
  for (const auto& fp : ls.fixed_phrases) {
    for (const auto& w : fp.words)
      if (!lex.contains(w))
        throw LineError("fixed phrase word not in lexicon: " + w);
  }
  if (!meter::viable_line_ending(ls.rhyme_word, lex))
    throw LineError("rhyme word '" + ls.rhyme_word +
                    "' fits no template suffix");

  std::vector<Requirement> reqs = build_requirements(ls);
  bool relaxed = false;
  std::vector<std::string> dropped;

  // Relaxation ladder: base params, then doubled beam width and N, then the
  // worst-ranked requirement dropped one at a time.
  while (true) {
    std::vector<LineSearch> searches;
    searches.reserve(meter::line_templates().size());
    for (const auto& tpl : meter::line_templates())
      searches.emplace_back(tpl, reqs, ls.rhyme_word, poem, model, lex);

    for (int round = 0; round < 2; ++round) {
      int width = params.beam_width << round;
      int samples = params.samples_per_step << round;
      for (int attempt = 0; attempt < params.retry_budget; ++attempt) {
        AttemptResult res = run_attempt(searches, model, lex, width, samples,
                                        params, rng);
        if (res.success) {
          LineResult line;
          line.words.assign(res.best.tokens.rbegin(), res.best.tokens.rend());
          line.matched = res.tpl->kind;
          line.logprob = res.best.logprob;
          line.relaxed = relaxed;
          line.dropped_words = dropped;
          return line;
        }
      }
    }

    // Drop the lowest-ranked plain content word; phrases go last.
    int drop = -1;
    for (size_t r = 0; r < reqs.size(); ++r) {
      if (reqs[r].is_phrase()) continue;
      if (drop < 0 || reqs[r].rank > reqs[static_cast<size_t>(drop)].rank)
        drop = static_cast<int>(r);
    }
    if (drop < 0 && !reqs.empty()) {
      for (size_t r = 0; r < reqs.size(); ++r) {
        if (drop < 0 || reqs[r].rank > reqs[static_cast<size_t>(drop)].rank)
          drop = static_cast<int>(r);
      }
    }
    if (drop < 0)
      throw LineError("no valid line found for rhyme word '" + ls.rhyme_word +
                      "' even with all content words dropped");
    relaxed = true;
    for (const auto& w : reqs[static_cast<size_t>(drop)].words)
      dropped.push_back(w);
    reqs.erase(reqs.begin() + drop);
  }
}

Sonnet generate_sonnet(const sketch::Sketch& sk,
                       const meter::RhymeScheme& scheme,
                       const lm::LanguageModel& model,
                       const phonetics::PronunciationLexicon& lex,
                       const DecodeParams& params, RandomSource& rng) {
  for (size_t i = 0; i < sk.lines.size(); ++i) {
    if (sk.lines[i].rhyme_word.empty())
      throw SonnetError("line " + std::to_string(i + 1) +
                        ": sketch is missing a rhyme word");
  }
  Sonnet sonnet;
  sonnet.title = sk.title;
  sonnet.scheme = scheme.name();
  PoemState poem(params.sampler.no_repeat_ngram_size);
  for (size_t i = 0; i < sk.lines.size(); ++i) {
    try {
      sonnet.lines[i] =
          generate_line(sk.lines[i], poem, model, lex, params, rng);
    } catch (const LineError& e) {
      throw SonnetError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    poem.add_line(sonnet.lines[i].words);
  }
  return sonnet;
}

std::set<std::pair<meter::TemplateKind, std::vector<std::string>>>
reachable_lines(const sketch::LineSketch& ls, const PoemState& poem,
                const lm::LanguageModel& model,
                const phonetics::PronunciationLexicon& lex,
                const std::vector<meter::TemplateKind>& templates) {
  std::vector<Requirement> reqs = build_requirements(ls);
  std::set<std::pair<meter::TemplateKind, std::vector<std::string>>> result;

  for (const auto& tpl : meter::line_templates()) {
    if (std::find(templates.begin(), templates.end(), tpl.kind) ==
        templates.end())
      continue;
    LineSearch search(tpl, reqs, ls.rhyme_word, poem, model, lex);
    std::vector<Beam> beams;
    for (auto& b : search.initial_beams()) {
      if (search.completed(b)) {
        if (search.valid_completion(b))
          result.insert({tpl.kind, std::vector<std::string>(
                                       b.tokens.rbegin(), b.tokens.rend())});
      } else {
        beams.push_back(std::move(b));
      }
    }
    lm::NextWordDistribution dummy;
    dummy.probs.assign(model.vocab().size(), 0.0);

    int guard = 0;
    while (!beams.empty() && guard++ < 16) {
      std::vector<Beam> next;
      for (const auto& beam : beams) {
        if (search.completed(beam)) continue;
        std::vector<Beam> out;
        for (size_t r = 0; r < reqs.size(); ++r) {
          if ((beam.remaining >> r) & 1u)
            search.expand(beam, static_cast<int>(r), "", dummy, out);
        }
        for (const auto& w : lex.words()) search.expand(beam, -1, w, dummy, out);
        for (auto& nb : out) {
          if (search.completed(nb)) {
            if (search.valid_completion(nb)) {
              std::vector<std::string> reading(nb.tokens.rbegin(),
                                               nb.tokens.rend());
              result.insert({tpl.kind, std::move(reading)});
            }
          } else {
            next.push_back(std::move(nb));
          }
        }
      }
      // Dedupe states: pronunciation choices collapse when consumed matches.
      std::set<BeamKey> seen;
      std::vector<Beam> unique;
      for (auto& b : next) {
        BeamKey key{b.tokens, b.consumed, b.remaining};
        if (seen.insert(std::move(key)).second) unique.push_back(std::move(b));
      }
      beams = std::move(unique);
    }
  }
  return result;
}

std::string to_text(const Sonnet& s, const meter::RhymeScheme& scheme) {
  std::ostringstream out;
  std::vector<int> stanzas = scheme.stanza_sizes();
  if (stanzas.empty()) stanzas = {14};
  size_t line = 0;
  for (size_t st = 0; st < stanzas.size(); ++st) {
    if (st > 0) out << '\n';
    for (int k = 0; k < stanzas[st]; ++k, ++line) {
      const auto& words = s.lines[line].words;
      for (size_t w = 0; w < words.size(); ++w) {
        if (w > 0) out << ' ';
        out << words[w];
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace sonneteer::decoder
