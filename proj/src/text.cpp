// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sonneteer::text {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open file: " + path.string());
  return in;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string normalize_word(std::string_view raw) {
  size_t begin = 0, end = raw.size();
  while (begin < end && !is_letter(raw[begin])) ++begin;
  while (end > begin && !is_letter(raw[end - 1])) --end;
  std::string out;
  out.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    char c = raw[i];
    if (is_letter(c) || c == '\'') out.push_back(c);
  }
  return to_lower(out);
}

std::vector<MarkedToken> tokenize_marked(std::string_view line) {
  std::vector<MarkedToken> out;
  std::string cur;
  bool pending_break = false;
  bool break_for_next = false;
  auto flush = [&]() {
    if (cur.empty()) return;
    std::string norm = normalize_word(cur);
    if (!norm.empty()) {
      out.push_back({std::move(norm), break_for_next});
      break_for_next = false;
    }
    cur.clear();
  };
  for (char c : line) {
    if (is_letter(c) || c == '\'') {
      if (pending_break) {
        break_for_next = true;
        pending_break = false;
      }
      cur.push_back(c);
    } else if (c == '-') {
      flush();  // hyphen splits without breaking the phrase
    } else {
      if (!std::isspace(static_cast<unsigned char>(c))) pending_break = true;
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  for (auto& t : tokenize_marked(line)) out.push_back(std::move(t.word));
  return out;
}

std::vector<std::vector<std::string>> split_sentences(std::string_view body) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> cur;
  std::string word;
  auto flush_word = [&]() {
    if (word.empty()) return;
    std::string norm = normalize_word(word);
    if (!norm.empty()) cur.push_back(std::move(norm));
    word.clear();
  };
  auto flush_sentence = [&]() {
    flush_word();
    if (!cur.empty()) sentences.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : body) {
    if (is_letter(c) || c == '\'') {
      word.push_back(c);
    } else if (c == '\n' || is_sentence_end(c)) {
      flush_sentence();
    } else {
      flush_word();
    }
  }
  flush_sentence();
  return sentences;
}

Stopwords Stopwords::load(std::istream& in) {
  Stopwords sw;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    std::istringstream ls(line);
    std::string w;
    while (ls >> w) {
      std::string norm = normalize_word(w);
      if (!norm.empty()) sw.set_.insert(std::move(norm));
    }
  }
  return sw;
}

Stopwords Stopwords::load_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load(in);
}

Corpus Corpus::load(std::istream& in) {
  Corpus corpus;
  Document doc;
  std::string line;
  auto flush = [&]() {
    if (!doc.lines.empty()) corpus.docs.push_back(std::move(doc));
    doc = Document{};
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) {
      flush();
    } else {
      doc.lines.push_back(line);
    }
  }
  flush();
  return corpus;
}

Corpus Corpus::load_path(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  Corpus corpus;
  auto load_one = [&corpus](const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open corpus file: " + file.string());
    Corpus part = load(in);
    for (auto& d : part.docs) corpus.docs.push_back(std::move(d));
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_one(f);
  } else {
    load_one(path);
  }
  if (corpus.docs.empty())
    throw LoadError("corpus is empty: " + path.string());
  return corpus;
}

size_t Corpus::filter_by_length(size_t min_lines, size_t max_lines) {
  size_t before = docs.size();
  std::erase_if(docs, [&](const Document& d) {
    return d.lines.size() < min_lines || d.lines.size() > max_lines;
  });
  return before - docs.size();
}

std::vector<std::string> Corpus::all_lines() const {
  std::vector<std::string> out;
  for (const auto& d : docs)
    out.insert(out.end(), d.lines.begin(), d.lines.end());
  return out;
}

}  // namespace sonneteer::text
