// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sonneteer/common.hpp"

namespace sonneteer::phonetics {

/// Metrical stress of one syllable. Ambiguous fills either slot: monosyllables
/// and secondary-stressed syllables serve as both stressed and unstressed.
enum class StressMark : char {
  Unstressed = 'U',
  Stressed = 'S',
  Ambiguous = 'A',
};

enum class RhymeKind {
  None,
  Slant,
  Strict,
};

std::string_view to_string(RhymeKind k);

/// One ARPAbet phoneme. Vowels carry a stress digit (0 unstressed, 1 primary,
/// 2 secondary); consonants carry none.
struct Phoneme {
  std::string symbol;  // bare ARPAbet code, e.g. "AO" or "L"
  int8_t stress = -1;  // -1 for consonants

  bool is_vowel() const { return stress >= 0; }
  bool operator==(const Phoneme&) const = default;

  /// Renders back to dictionary form ("AO1", "L").
  std::string str() const;
};

/// True if the bare symbol names one of the 39 ARPAbet phonemes.
bool is_vowel_symbol(std::string_view symbol);
bool is_consonant_symbol(std::string_view symbol);

/// Manner-of-articulation class used by the slant-rhyme coda rule.
enum class Manner { Stop, Affricate, Fricative, Nasal, Liquid, Glide };
Manner manner_of(std::string_view consonant_symbol);

struct Pronunciation {
  std::vector<Phoneme> phonemes;

  // Derived fields, filled by finalize().
  std::vector<StressMark> stress;        // one mark per vowel
  int rhyme_start = 0;                   // index of the rhyme-part vowel
  std::string rhyme_vowel;               // its bare symbol
  std::vector<std::string> tail;         // bare symbols after the rhyme vowel,
                                         // coda liquids (L, R) removed
  std::string strict_key;                // rhyme_vowel + tail, space-joined

  void finalize();
  int syllable_count() const { return static_cast<int>(stress.size()); }
  bool operator==(const Pronunciation& o) const {
    return phonemes == o.phonemes;
  }
};

/// Parses a single "PH1 PH2 ..." phoneme string (used by tests and tools).
Pronunciation parse_pronunciation(std::string_view phoneme_str);

/// Per-vowel stress marks. A pronunciation with exactly one vowel is Ambiguous
/// regardless of its stress digit; otherwise 1 -> Stressed, 0 -> Unstressed,
/// 2 -> Ambiguous.
std::vector<StressMark> stress_pattern(const Pronunciation& p);

int syllable_count(const Pronunciation& p);

/// Suffix starting at the last primary-stressed vowel; failing that, the last
/// secondary-stressed vowel; failing that, the last vowel.
std::vector<Phoneme> rhyme_part(const Pronunciation& p);

struct LexiconStats {
  size_t total_lines = 0;
  size_t comment_lines = 0;
  size_t entry_lines = 0;      // accepted pronunciation entries
  size_t alternate_lines = 0;  // accepted "WORD(n)" entries
  size_t orphan_alternate_lines = 0;  // "WORD(n)" without a base entry
  size_t malformed_lines = 0;
};

class PronunciationLexicon {
 public:
  /// Reads CMU-dict format: ";;;" comments, "WORD  PH1 PH2 ..." entries,
  /// "WORD(n)" alternates merged under the base word. Structurally malformed
  /// lines are recorded in warnings() and skipped; a line with an unknown
  /// phoneme symbol raises ParseError naming the line and symbol.
  static PronunciationLexicon parse(std::istream& in);
  static PronunciationLexicon parse_file(const std::filesystem::path& path);

  bool contains(std::string_view word) const;

  /// Case-insensitive lookup. Throws LookupError naming the word if absent.
  const std::vector<Pronunciation>& lookup(std::string_view word) const;

  size_t size() const { return words_.size(); }
  size_t pronunciation_count() const;
  const std::vector<std::string>& words() const { return words_; }
  /// Direct access by dense word id (the index into words()).
  const std::vector<Pronunciation>& pronunciations(uint32_t id) const {
    return prons_[id];
  }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const LexiconStats& stats() const { return stats_; }

  /// Inserts an entry (test and tool support). The word is lowercased.
  void add(std::string_view word, std::string_view phoneme_str);

 private:
  std::vector<std::string> words_;  // lowercase, insertion order
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<std::vector<Pronunciation>> prons_;
  std::vector<std::string> warnings_;
  LexiconStats stats_;
};

/// Strict (identical rhyme parts, vowel stress digits and coda liquids
/// transparent), slant (same rhyme vowel, similar codas), or none. Throws
/// LookupError for unknown words and ValidationError when a == b after
/// lowercasing.
RhymeKind classify_rhyme(std::string_view a, std::string_view b,
                         const PronunciationLexicon& lex);

/// Pronunciation-level classification; words match when any pair does.
RhymeKind classify_rhyme(const std::vector<Pronunciation>& a,
                         const std::vector<Pronunciation>& b);

/// Prebuilt buckets over rhyme keys so candidate retrieval does not rescan
/// the whole dictionary per query. The OpenMP path and the serial reference
/// below must return identical, sorted word lists.
class RhymeIndex {
 public:
  explicit RhymeIndex(const PronunciationLexicon& lex);

  /// All lexicon words that rhyme (strict or slant) with `word`, sorted,
  /// excluding `word` itself. Bucketed scan, parallel inner loop.
  std::vector<std::string> candidates(std::string_view word) const;

  /// Reference implementation: classify_rhyme against every lexicon word.
  std::vector<std::string> candidates_serial(std::string_view word) const;

  const PronunciationLexicon& lexicon() const { return *lex_; }

 private:
  const PronunciationLexicon* lex_;
  std::unordered_map<std::string, std::vector<uint32_t>> strict_buckets_;
  std::unordered_map<std::string, std::vector<uint32_t>> vowel_buckets_;
};

/// Convenience wrapper over RhymeIndex::candidates for one-off queries.
std::vector<std::string> rhyme_candidates(std::string_view word,
                                          const RhymeIndex& index);

}  // namespace sonneteer::phonetics
