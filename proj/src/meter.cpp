// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/meter.hpp"

#include <algorithm>
#include <set>

#include "sonneteer/text.hpp"

namespace sonneteer::meter {

namespace {

using phonetics::Pronunciation;
using phonetics::RhymeKind;

std::vector<StressMark> repeat_iamb(int feet) {
  std::vector<StressMark> marks;
  for (int i = 0; i < feet; ++i) {
    marks.push_back(StressMark::Unstressed);
    marks.push_back(StressMark::Stressed);
  }
  return marks;
}

}  // namespace

std::string_view to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::Standard: return "standard";
    case TemplateKind::InvertedFirstFoot: return "inverted_first_foot";
    default: return "feminine";
  }
}

std::optional<TemplateKind> template_from_string(std::string_view name) {
  if (name == "standard") return TemplateKind::Standard;
  if (name == "inverted_first_foot") return TemplateKind::InvertedFirstFoot;
  if (name == "feminine") return TemplateKind::Feminine;
  return std::nullopt;
}

const std::vector<StressTemplate>& line_templates() {
  static const std::vector<StressTemplate> templates = [] {
    std::vector<StressTemplate> t;
    t.push_back({TemplateKind::Standard, "standard", repeat_iamb(5)});

    std::vector<StressMark> inverted = repeat_iamb(5);
    std::swap(inverted[0], inverted[1]);  // (S U)(U S)x4
    t.push_back({TemplateKind::InvertedFirstFoot, "inverted_first_foot",
                 std::move(inverted)});

    std::vector<StressMark> feminine = repeat_iamb(5);
    feminine.push_back(StressMark::Unstressed);
    t.push_back({TemplateKind::Feminine, "feminine", std::move(feminine)});
    return t;
  }();
  return templates;
}

bool pattern_matches(std::span<const StressMark> pattern,
                     std::span<const StressMark> slots) {
  if (pattern.size() != slots.size()) return false;
  for (size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == StressMark::Ambiguous) continue;
    if (pattern[i] != slots[i]) return false;
  }
  return true;
}

const Pronunciation* word_fits(std::span<const StressMark> slots,
                               std::string_view word,
                               const PronunciationLexicon& lex) {
  for (const auto& pron : lex.lookup(word)) {
    if (pattern_matches(pron.stress, slots)) return &pron;
  }
  return nullptr;
}

bool viable_line_ending(const std::vector<phonetics::Pronunciation>& prons) {
  for (const auto& tpl : line_templates()) {
    for (const auto& pron : prons) {
      size_t k = pron.stress.size();
      if (k > tpl.length()) continue;
      std::span<const StressMark> suffix(tpl.marks.data() + tpl.length() - k, k);
      if (pattern_matches(pron.stress, suffix)) return true;
    }
  }
  return false;
}

bool viable_line_ending(std::string_view word,
                        const PronunciationLexicon& lex) {
  return viable_line_ending(lex.lookup(word));
}

ScanResult scan_line(const std::vector<std::string>& words,
                     const PronunciationLexicon& lex) {
  ScanResult result;
  for (const auto& w : words) {
    if (!lex.contains(w)) result.unknown_words.push_back(w);
  }
  if (!result.unknown_words.empty() || words.empty()) return result;

  for (const auto& tpl : line_templates()) {
    const size_t len = tpl.length();
    std::vector<std::vector<StressMark>> assignment(words.size());
    // Failed (word index, position) states; keeps backtracking linear.
    std::set<std::pair<size_t, size_t>> dead;

    auto dfs = [&](auto&& self, size_t wi, size_t pos) -> bool {
      if (wi == words.size()) return pos == len;
      if (dead.count({wi, pos})) return false;
      for (const auto& pron : lex.lookup(words[wi])) {
        size_t k = pron.stress.size();
        if (pos + k > len) continue;
        std::span<const StressMark> slots(tpl.marks.data() + pos, k);
        if (!pattern_matches(pron.stress, slots)) continue;
        if (self(self, wi + 1, pos + k)) {
          assignment[wi].assign(slots.begin(), slots.end());
          return true;
        }
      }
      dead.insert({wi, pos});
      return false;
    };
    if (dfs(dfs, 0, 0)) {
      result.matched = tpl.kind;
      result.word_slots = std::move(assignment);
      return result;
    }
  }
  return result;
}

RhymeScheme RhymeScheme::shakespearean() {
  RhymeScheme s;
  s.letters_ = "ABABCDCDEFEFGG";
  s.name_ = "shakespearean";
  s.stanza_sizes_ = {4, 4, 4, 2};
  return s;
}

RhymeScheme RhymeScheme::petrarchan() {
  RhymeScheme s;
  s.letters_ = "ABBAABBACDECDE";
  s.name_ = "petrarchan";
  s.stanza_sizes_ = {8, 6};
  return s;
}

RhymeScheme RhymeScheme::parse(std::string_view spec) {
  std::string lower = text::to_lower(spec);
  if (lower == "shakespearean") return shakespearean();
  if (lower == "petrarchan") return petrarchan();

  std::string letters;
  for (char c : spec) {
    if (c == ' ') continue;
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    if (c < 'A' || c > 'Z')
      throw ValidationError("rhyme scheme must use letters A-Z");
    letters.push_back(c);
  }
  if (letters.size() != 14)
    throw ValidationError("rhyme scheme must have 14 letters, got " +
                          std::to_string(letters.size()));
  for (char c : letters) {
    if (std::count(letters.begin(), letters.end(), c) < 2)
      throw ValidationError(std::string("scheme letter '") + c +
                            "' has no rhyme partner");
  }
  RhymeScheme s;
  s.letters_ = letters;
  s.name_ = letters;
  if (letters == "ABABCDCDEFEFGG") s.stanza_sizes_ = {4, 4, 4, 2};
  if (letters == "ABBAABBACDECDE") s.stanza_sizes_ = {8, 6};
  return s;
}

std::vector<std::pair<int, int>> RhymeScheme::letter_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (size_t i = 0; i < letters_.size(); ++i) {
    for (size_t j = i + 1; j < letters_.size(); ++j) {
      if (letters_[i] == letters_[j])
        pairs.emplace_back(static_cast<int>(i + 1), static_cast<int>(j + 1));
    }
  }
  return pairs;
}

std::vector<int> initial_rhyme_lines(const RhymeScheme& scheme) {
  std::vector<int> out;
  std::set<char> seen;
  const auto& letters = scheme.letters();
  for (size_t i = 0; i < letters.size(); ++i) {
    if (seen.insert(letters[i]).second) out.push_back(static_cast<int>(i + 1));
  }
  return out;
}

eval::FormatReport check_sonnet_format(const std::vector<std::string>& lines,
                                       const RhymeScheme& scheme,
                                       const PronunciationLexicon& lex) {
  if (lines.size() != 14)
    throw ValidationError("a sonnet has 14 lines, got " +
                          std::to_string(lines.size()));

  eval::FormatReport report;
  report.line_count = 14;

  std::vector<std::vector<std::string>> tokens(14);
  for (size_t i = 0; i < 14; ++i) tokens[i] = text::tokenize(lines[i]);

  for (size_t i = 0; i < 14; ++i) {
    eval::LineDiag diag;
    diag.line = static_cast<int>(i + 1);
    const auto& toks = tokens[i];
    for (const auto& w : toks)
      if (!lex.contains(w)) diag.unknown_words.push_back(w);

    if (toks.empty() || !diag.unknown_words.empty()) {
      diag.meter_ok = false;
      diag.syllable_ok = false;
    } else {
      ScanResult scan = scan_line(toks, lex);
      diag.meter_ok = scan.matched.has_value();
      if (scan.matched)
        diag.matched_template = std::string(to_string(*scan.matched));
      // Looser standard: any pronunciation choice totaling 10 or 11.
      std::set<int> totals{0};
      for (const auto& w : toks) {
        std::set<int> next;
        for (const auto& pron : lex.lookup(w)) {
          for (int t : totals) {
            int v = t + pron.syllable_count();
            if (v <= 11) next.insert(v);
          }
        }
        totals = std::move(next);
      }
      diag.syllable_ok = totals.count(10) > 0 || totals.count(11) > 0;
    }
    if (diag.meter_ok) ++report.meter_ok;
    if (diag.syllable_ok) ++report.syllable_ok;
    report.lines.push_back(std::move(diag));
  }

  for (auto [a, b] : scheme.letter_pairs()) {
    eval::PairDiag diag;
    diag.line_a = a;
    diag.line_b = b;
    diag.letter = scheme.letters()[static_cast<size_t>(a - 1)];
    const auto& ta = tokens[static_cast<size_t>(a - 1)];
    const auto& tb = tokens[static_cast<size_t>(b - 1)];
    diag.word_a = ta.empty() ? "" : ta.back();
    diag.word_b = tb.empty() ? "" : tb.back();
    if (diag.word_a.empty() || diag.word_b.empty() ||
        !lex.contains(diag.word_a) || !lex.contains(diag.word_b)) {
      diag.ok = false;
      diag.kind = "unknown-word";
    } else if (diag.word_a == diag.word_b) {
      diag.ok = false;
      diag.kind = "identical";
    } else {
      RhymeKind kind = phonetics::classify_rhyme(diag.word_a, diag.word_b, lex);
      diag.ok = kind != RhymeKind::None;
      diag.kind = std::string(phonetics::to_string(kind));
    }
    if (diag.ok) ++report.rhyme_ok;
    ++report.rhyme_total;
    report.pairs.push_back(std::move(diag));
  }

  report.rhyme_pct =
      report.rhyme_total ? 100.0 * report.rhyme_ok / report.rhyme_total : 0.0;
  report.meter_pct = 100.0 * report.meter_ok / 14.0;
  report.syllable_pct = 100.0 * report.syllable_ok / 14.0;
  return report;
}

}  // namespace sonneteer::meter
