// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/phonetics.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sonneteer/text.hpp"

namespace sonneteer::phonetics {

namespace {

const std::array<std::string_view, 15> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW"};

const std::array<std::string_view, 24> kConsonants = {
    "B", "CH", "D", "DH", "F",  "G", "HH", "JH", "K", "L",  "M", "N",
    "NG", "P", "R", "S",  "SH", "T", "TH", "V",  "W", "Y",  "Z", "ZH"};

bool is_liquid(std::string_view symbol) { return symbol == "L" || symbol == "R"; }

/// True when `needle` is a (not necessarily contiguous) subsequence of `hay`.
bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& hay) {
  size_t i = 0;
  for (const auto& h : hay) {
    if (i < needle.size() && needle[i] == h) ++i;
  }
  return i == needle.size();
}

/// Coda-similarity rule for slant rhymes: one tail a subsequence of the
/// other, or both ending in consonants of the same manner class.
bool tails_similar(const std::vector<std::string>& a,
                   const std::vector<std::string>& b) {
  if (is_subsequence(a, b) || is_subsequence(b, a)) return true;
  if (a.empty() || b.empty()) return false;  // empty is a subsequence anyway
  const std::string& fa = a.back();
  const std::string& fb = b.back();
  if (!is_consonant_symbol(fa) || !is_consonant_symbol(fb)) return false;
  return manner_of(fa) == manner_of(fb);
}

RhymeKind classify_prons(const std::vector<Pronunciation>& pa,
                         const std::vector<Pronunciation>& pb) {
  bool slant = false;
  for (const auto& a : pa) {
    for (const auto& b : pb) {
      if (a.strict_key == b.strict_key) return RhymeKind::Strict;
      if (a.rhyme_vowel == b.rhyme_vowel && tails_similar(a.tail, b.tail))
        slant = true;
    }
  }
  return slant ? RhymeKind::Slant : RhymeKind::None;
}

}  // namespace

std::string_view to_string(RhymeKind k) {
  switch (k) {
    case RhymeKind::Strict: return "strict";
    case RhymeKind::Slant: return "slant";
    default: return "none";
  }
}

std::string Phoneme::str() const {
  if (!is_vowel()) return symbol;
  return symbol + static_cast<char>('0' + stress);
}

bool is_vowel_symbol(std::string_view symbol) {
  return std::find(kVowels.begin(), kVowels.end(), symbol) != kVowels.end();
}

bool is_consonant_symbol(std::string_view symbol) {
  return std::find(kConsonants.begin(), kConsonants.end(), symbol) !=
         kConsonants.end();
}

Manner manner_of(std::string_view c) {
  if (c == "P" || c == "B" || c == "T" || c == "D" || c == "K" || c == "G")
    return Manner::Stop;
  if (c == "CH" || c == "JH") return Manner::Affricate;
  if (c == "F" || c == "V" || c == "TH" || c == "DH" || c == "S" || c == "Z" ||
      c == "SH" || c == "ZH" || c == "HH")
    return Manner::Fricative;
  if (c == "M" || c == "N" || c == "NG") return Manner::Nasal;
  if (c == "L" || c == "R") return Manner::Liquid;
  return Manner::Glide;  // W, Y
}

void Pronunciation::finalize() {
  stress.clear();
  int vowels = 0;
  for (const auto& p : phonemes)
    if (p.is_vowel()) ++vowels;
  for (const auto& p : phonemes) {
    if (!p.is_vowel()) continue;
    if (vowels == 1) {
      stress.push_back(StressMark::Ambiguous);
    } else if (p.stress == 1) {
      stress.push_back(StressMark::Stressed);
    } else if (p.stress == 0) {
      stress.push_back(StressMark::Unstressed);
    } else {
      stress.push_back(StressMark::Ambiguous);  // secondary stress
    }
  }

  // Rhyme part: last primary-stressed vowel, else last secondary, else last.
  int last_primary = -1, last_secondary = -1, last_vowel = -1;
  for (int i = 0; i < static_cast<int>(phonemes.size()); ++i) {
    if (!phonemes[i].is_vowel()) continue;
    last_vowel = i;
    if (phonemes[i].stress == 1) last_primary = i;
    if (phonemes[i].stress == 2) last_secondary = i;
  }
  rhyme_start = last_primary >= 0   ? last_primary
                : last_secondary >= 0 ? last_secondary
                                      : last_vowel;
  rhyme_vowel.clear();
  tail.clear();
  strict_key.clear();
  if (rhyme_start < 0) return;  // vowel-less, rejected at parse time
  rhyme_vowel = phonemes[rhyme_start].symbol;
  // Coda liquids are transparent: "fall"/"thaw", "world"/"word" compare equal.
  for (size_t i = rhyme_start + 1; i < phonemes.size(); ++i) {
    const auto& p = phonemes[i];
    if (!p.is_vowel() && is_liquid(p.symbol)) continue;
    tail.push_back(p.symbol);
  }
  strict_key = rhyme_vowel;
  for (const auto& s : tail) {
    strict_key.push_back(' ');
    strict_key += s;
  }
}

Pronunciation parse_pronunciation(std::string_view phoneme_str) {
  Pronunciation pron;
  std::istringstream in{std::string(phoneme_str)};
  std::string tok;
  while (in >> tok) {
    Phoneme p;
    char last = tok.back();
    if (last >= '0' && last <= '2') {
      p.symbol = tok.substr(0, tok.size() - 1);
      p.stress = static_cast<int8_t>(last - '0');
      if (!is_vowel_symbol(p.symbol))
        throw ParseError("unknown phoneme symbol: " + tok);
    } else {
      p.symbol = tok;
      p.stress = -1;
      if (!is_consonant_symbol(p.symbol))
        throw ParseError("unknown phoneme symbol: " + tok);
    }
    pron.phonemes.push_back(std::move(p));
  }
  if (pron.phonemes.empty()) throw ParseError("empty pronunciation");
  pron.finalize();
  return pron;
}

std::vector<StressMark> stress_pattern(const Pronunciation& p) {
  return p.stress;
}

int syllable_count(const Pronunciation& p) { return p.syllable_count(); }

std::vector<Phoneme> rhyme_part(const Pronunciation& p) {
  std::vector<Phoneme> out;
  if (p.rhyme_start < 0) return out;
  out.assign(p.phonemes.begin() + p.rhyme_start, p.phonemes.end());
  return out;
}

PronunciationLexicon PronunciationLexicon::parse(std::istream& in) {
  if (!in) throw LoadError("unreadable pronunciation lexicon stream");
  PronunciationLexicon lex;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++lex.stats_.total_lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(";;;", 0) == 0) {
      ++lex.stats_.comment_lines;
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      ++lex.stats_.comment_lines;
      continue;
    }

    std::istringstream ls(line);
    std::string head;
    ls >> head;
    bool alternate = false;
    if (auto paren = head.find('('); paren != std::string::npos) {
      // "WORD(n)" alternates merge under the base word.
      if (head.back() != ')' || paren == 0) {
        lex.warnings_.push_back("line " + std::to_string(line_no) +
                                ": malformed word field '" + head + "'");
        ++lex.stats_.malformed_lines;
        continue;
      }
      head = head.substr(0, paren);
      alternate = true;
    }

    Pronunciation pron;
    std::string tok;
    bool bad = false;
    while (ls >> tok) {
      Phoneme p;
      char last = tok.back();
      if (last >= '0' && last <= '9') {
        if (last > '2' || !is_vowel_symbol(tok.substr(0, tok.size() - 1))) {
          throw ParseError("line " + std::to_string(line_no) +
                           ": unknown phoneme symbol '" + tok + "'");
        }
        p.symbol = tok.substr(0, tok.size() - 1);
        p.stress = static_cast<int8_t>(last - '0');
      } else if (is_consonant_symbol(tok)) {
        p.symbol = tok;
        p.stress = -1;
      } else {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unknown phoneme symbol '" + tok + "'");
      }
      pron.phonemes.push_back(std::move(p));
    }
    if (pron.phonemes.empty()) {
      lex.warnings_.push_back("line " + std::to_string(line_no) +
                              ": no phonemes");
      ++lex.stats_.malformed_lines;
      continue;
    }
    pron.finalize();
    if (pron.syllable_count() == 0) {
      lex.warnings_.push_back("line " + std::to_string(line_no) +
                              ": pronunciation without a vowel");
      ++lex.stats_.malformed_lines;
      bad = true;
    }
    if (bad) continue;

    std::string word = text::to_lower(head);
    auto [it, inserted] =
        lex.index_.try_emplace(word, static_cast<uint32_t>(lex.words_.size()));
    if (inserted) {
      lex.words_.push_back(word);
      lex.prons_.emplace_back();
    }
    lex.prons_[it->second].push_back(std::move(pron));
    ++lex.stats_.entry_lines;
    if (alternate) {
      ++lex.stats_.alternate_lines;
      if (inserted) ++lex.stats_.orphan_alternate_lines;
    }
  }
  return lex;
}

PronunciationLexicon PronunciationLexicon::parse_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open lexicon: " + path.string());
  return parse(in);
}

bool PronunciationLexicon::contains(std::string_view word) const {
  return index_.count(text::to_lower(word)) > 0;
}

const std::vector<Pronunciation>& PronunciationLexicon::lookup(
    std::string_view word) const {
  auto it = index_.find(text::to_lower(word));
  if (it == index_.end())
    throw LookupError("word not in lexicon: " + std::string(word));
  return prons_[it->second];
}

size_t PronunciationLexicon::pronunciation_count() const {
  size_t n = 0;
  for (const auto& v : prons_) n += v.size();
  return n;
}

void PronunciationLexicon::add(std::string_view word,
                               std::string_view phoneme_str) {
  Pronunciation pron = parse_pronunciation(phoneme_str);
  if (pron.syllable_count() == 0)
    throw ParseError("pronunciation without a vowel: " + std::string(word));
  std::string key = text::to_lower(word);
  auto [it, inserted] =
      index_.try_emplace(key, static_cast<uint32_t>(words_.size()));
  if (inserted) {
    words_.push_back(key);
    prons_.emplace_back();
  }
  prons_[it->second].push_back(std::move(pron));
  ++stats_.entry_lines;
}

RhymeKind classify_rhyme(std::string_view a, std::string_view b,
                         const PronunciationLexicon& lex) {
  std::string la = text::to_lower(a), lb = text::to_lower(b);
  if (la == lb)
    throw ValidationError("cannot rhyme a word with itself: " + la);
  return classify_prons(lex.lookup(la), lex.lookup(lb));
}

RhymeKind classify_rhyme(const std::vector<Pronunciation>& a,
                         const std::vector<Pronunciation>& b) {
  return classify_prons(a, b);
}

RhymeIndex::RhymeIndex(const PronunciationLexicon& lex) : lex_(&lex) {
  const auto& words = lex.words();
  for (uint32_t id = 0; id < words.size(); ++id) {
    for (const auto& pron : lex.pronunciations(id)) {
      auto& sb = strict_buckets_[pron.strict_key];
      if (sb.empty() || sb.back() != id) sb.push_back(id);
      auto& vb = vowel_buckets_[pron.rhyme_vowel];
      if (vb.empty() || vb.back() != id) vb.push_back(id);
    }
  }
}

std::vector<std::string> RhymeIndex::candidates(std::string_view word) const {
  const auto& words = lex_->words();
  std::string key = text::to_lower(word);
  const auto& prons = lex_->lookup(key);

  std::vector<char> hit(words.size(), 0);
  for (const auto& pron : prons) {
    if (auto it = strict_buckets_.find(pron.strict_key);
        it != strict_buckets_.end()) {
      for (uint32_t id : it->second) hit[id] = 1;
    }
    auto vb = vowel_buckets_.find(pron.rhyme_vowel);
    if (vb == vowel_buckets_.end()) continue;
    const auto& bucket = vb->second;
    const int64_t n = static_cast<int64_t>(bucket.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      uint32_t id = bucket[static_cast<size_t>(i)];
      if (hit[id]) continue;
      for (const auto& other : lex_->pronunciations(id)) {
        if (other.rhyme_vowel == pron.rhyme_vowel &&
            tails_similar(other.tail, pron.tail)) {
          hit[id] = 1;
          break;
        }
      }
    }
  }

  std::vector<std::string> out;
  for (uint32_t id = 0; id < words.size(); ++id) {
    if (hit[id] && words[id] != key) out.push_back(words[id]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> RhymeIndex::candidates_serial(
    std::string_view word) const {
  std::string key = text::to_lower(word);
  lex_->lookup(key);  // surface LookupError like the indexed path
  std::vector<std::string> out;
  for (const auto& other : lex_->words()) {
    if (other == key) continue;
    if (classify_rhyme(key, other, *lex_) != RhymeKind::None)
      out.push_back(other);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> rhyme_candidates(std::string_view word,
                                          const RhymeIndex& index) {
  return index.candidates(word);
}

}  // namespace sonneteer::phonetics
