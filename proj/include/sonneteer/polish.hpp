// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sonneteer/common.hpp"
#include "sonneteer/phonetics.hpp"
#include "sonneteer/sketch.hpp"

namespace sonneteer::polish {

/// symbol -> (imagery word, confidence), sorted by descending confidence.
/// TSV rows: symbol<TAB>imagery<TAB>confidence.
class ImageryTable {
 public:
  static ImageryTable load(std::istream& in);
  static ImageryTable load_file(const std::filesystem::path& path);

  void add(std::string_view symbol, std::string_view imagery, double confidence);
  const std::vector<std::pair<std::string, double>>* find(
      std::string_view symbol) const;
  bool empty() const { return rows_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<std::pair<std::string, double>>>
      rows_;
};

/// adjective -> (vehicle phrase, confidence), sorted by descending confidence.
/// TSV rows: adjective<TAB>vehicle phrase<TAB>confidence.
class SimileTable {
 public:
  static SimileTable load(std::istream& in);
  static SimileTable load_file(const std::filesystem::path& path);

  void add(std::string_view adjective, std::string_view vehicle,
           double confidence);
  const std::vector<std::pair<std::string, double>>* find(
      std::string_view adjective) const;
  bool empty() const { return rows_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<std::pair<std::string, double>>>
      rows_;
};

enum class PosTag : uint8_t {
  Noun = 1,
  Adjective = 2,
  Verb = 4,
  Other = 8,
};

/// word -> part-of-speech tag set. TSV rows: word<TAB>tag[,tag...].
class PosLexicon {
 public:
  static PosLexicon load(std::istream& in);
  static PosLexicon load_file(const std::filesystem::path& path);

  void add(std::string_view word, uint8_t mask);
  bool has(std::string_view word, PosTag tag) const;
  bool empty() const { return tags_.empty(); }

 private:
  std::unordered_map<std::string, uint8_t> tags_;
};

/// True when some pronunciation choice of the phrase yields a strictly
/// alternating stress sequence (either parity; A matches both). This is the
/// meter gate for simile phrases; the decoder re-checks exact placement.
bool phrase_fits_alternating_meter(const std::vector<std::string>& words,
                                   const phonetics::PronunciationLexicon& lex);

/// Samples up to four nouns from the sketch's content words, looks up their
/// imagery, and replaces the `max_repl` most confident in place. Rhyme words
/// are never touched; nouns that equal an assigned rhyme word are skipped.
sketch::Sketch apply_imagery(const sketch::Sketch& sk, const ImageryTable& tbl,
                             const PosLexicon& pos,
                             const phonetics::PronunciationLexicon& lex,
                             int max_repl, RandomSource& rng);

/// Samples up to four adjectives, builds "ADJ like VEHICLE" phrases, keeps
/// those that fit the alternating-meter gate, and anchors the most confident
/// `max_add` as fixed phrases.
sketch::Sketch apply_similes(const sketch::Sketch& sk, const SimileTable& tbl,
                             const PosLexicon& pos,
                             const phonetics::PronunciationLexicon& lex,
                             int max_add, RandomSource& rng);

}  // namespace sonneteer::polish
