// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sonneteer/common.hpp"

namespace sonneteer::text {

std::string to_lower(std::string_view s);

/// Strips surrounding punctuation and lowercases. Apostrophes between letters
/// survive ("don't"); everything else at the edges is dropped.
std::string normalize_word(std::string_view raw);

/// Splits a line into normalized word tokens. Hyphenated words are split into
/// their parts; punctuation is dropped; the result is lowercase.
std::vector<std::string> tokenize(std::string_view line);

/// A token plus whether a phrase-breaking delimiter (punctuation other than
/// hyphen/apostrophe) occurred immediately before it. Keyword extraction needs
/// the break information; plain tokenize() does not.
struct MarkedToken {
  std::string word;
  bool break_before = false;
};
std::vector<MarkedToken> tokenize_marked(std::string_view line);

/// Splits text into sentences of word tokens. Sentence boundaries are
/// newlines and the sentence-final marks . ! ?
std::vector<std::vector<std::string>> split_sentences(std::string_view body);

class Stopwords {
 public:
  Stopwords() = default;
  static Stopwords load(std::istream& in);
  static Stopwords load_file(const std::filesystem::path& path);

  bool contains(std::string_view word) const {
    return set_.count(std::string(word)) > 0;
  }
  size_t size() const { return set_.size(); }
  void insert(std::string word) { set_.insert(std::move(word)); }

 private:
  std::unordered_set<std::string> set_;
};

/// A plain-text document: its raw lines, blank lines removed.
struct Document {
  std::vector<std::string> lines;
};

/// Corpus of prose documents. A file holds either one document or several
/// separated by blank lines; a directory is read file-by-file in name order.
struct Corpus {
  std::vector<Document> docs;

  static Corpus load(std::istream& in);
  static Corpus load_path(const std::filesystem::path& path);

  /// Keeps documents whose line count lies in [min_lines, max_lines].
  /// Returns the number of dropped documents.
  size_t filter_by_length(size_t min_lines, size_t max_lines);

  /// All lines of all documents concatenated, in order.
  std::vector<std::string> all_lines() const;
};

}  // namespace sonneteer::text
