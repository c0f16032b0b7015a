// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/polish.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sonneteer/text.hpp"

namespace sonneteer::polish {

namespace {

using phonetics::StressMark;

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open table: " + path.string());
  return in;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) fields.push_back(field);
  return fields;
}

template <typename Table>
void load_pair_table(std::istream& in, Table& table) {
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3)
      throw ParseError("table line " + std::to_string(line_no) +
                       ": expected 3 tab-separated fields");
    double conf = 0.0;
    try {
      conf = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw ParseError("table line " + std::to_string(line_no) +
                       ": bad confidence '" + fields[2] + "'");
    }
    if (conf < 0.0 || conf > 1.0)
      throw ParseError("table line " + std::to_string(line_no) +
                       ": confidence outside [0, 1]");
    table.add(text::to_lower(fields[0]), text::to_lower(fields[1]), conf);
  }
}

/// Positions of content words carrying a POS tag, excluding slots already
/// anchored by a fixed phrase.
struct Slot {
  size_t line;
  size_t index;
};

std::vector<Slot> tagged_slots(const sketch::Sketch& sk, const PosLexicon& pos,
                               PosTag tag) {
  std::vector<Slot> out;
  for (size_t li = 0; li < sk.lines.size(); ++li) {
    const auto& line = sk.lines[li];
    for (size_t wi = 0; wi < line.content_words.size(); ++wi) {
      bool anchored = false;
      for (const auto& fp : line.fixed_phrases)
        if (fp.anchor == static_cast<int>(wi)) anchored = true;
      if (anchored) continue;
      if (pos.has(line.content_words[wi], tag)) out.push_back({li, wi});
    }
  }
  return out;
}

/// Uniformly samples up to `want` slots without replacement.
std::vector<Slot> sample_slots(std::vector<Slot> slots, size_t want,
                               RandomSource& rng) {
  std::vector<Slot> picked;
  while (!slots.empty() && picked.size() < want) {
    size_t i = rng.uniform(slots.size());
    picked.push_back(slots[i]);
    slots.erase(slots.begin() + static_cast<long>(i));
  }
  return picked;
}

constexpr size_t kSampleSize = 4;  // "multiple" nouns/adjectives per pass

}  // namespace

ImageryTable ImageryTable::load(std::istream& in) {
  ImageryTable t;
  load_pair_table(in, t);
  return t;
}
ImageryTable ImageryTable::load_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load(in);
}
void ImageryTable::add(std::string_view symbol, std::string_view imagery,
                       double confidence) {
  auto& rows = rows_[std::string(symbol)];
  rows.emplace_back(std::string(imagery), confidence);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
}
const std::vector<std::pair<std::string, double>>* ImageryTable::find(
    std::string_view symbol) const {
  auto it = rows_.find(std::string(symbol));
  return it == rows_.end() ? nullptr : &it->second;
}

SimileTable SimileTable::load(std::istream& in) {
  SimileTable t;
  load_pair_table(in, t);
  return t;
}
SimileTable SimileTable::load_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load(in);
}
void SimileTable::add(std::string_view adjective, std::string_view vehicle,
                      double confidence) {
  if (vehicle.empty()) throw ParseError("simile vehicle phrase is empty");
  auto& rows = rows_[std::string(adjective)];
  rows.emplace_back(std::string(vehicle), confidence);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
}
const std::vector<std::pair<std::string, double>>* SimileTable::find(
    std::string_view adjective) const {
  auto it = rows_.find(std::string(adjective));
  return it == rows_.end() ? nullptr : &it->second;
}

PosLexicon PosLexicon::load(std::istream& in) {
  PosLexicon p;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2)
      throw ParseError("pos line " + std::to_string(line_no) +
                       ": expected word<TAB>tags");
    uint8_t mask = 0;
    std::istringstream tags(fields[1]);
    std::string tag;
    while (std::getline(tags, tag, ',')) {
      tag = text::to_lower(tag);
      if (tag == "noun") mask |= static_cast<uint8_t>(PosTag::Noun);
      else if (tag == "adjective" || tag == "adj")
        mask |= static_cast<uint8_t>(PosTag::Adjective);
      else if (tag == "verb") mask |= static_cast<uint8_t>(PosTag::Verb);
      else if (tag == "other") mask |= static_cast<uint8_t>(PosTag::Other);
      else
        throw ParseError("pos line " + std::to_string(line_no) +
                         ": unknown tag '" + tag + "'");
    }
    p.add(text::to_lower(fields[0]), mask);
  }
  return p;
}
PosLexicon PosLexicon::load_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load(in);
}
void PosLexicon::add(std::string_view word, uint8_t mask) {
  tags_[std::string(word)] |= mask;
}
bool PosLexicon::has(std::string_view word, PosTag tag) const {
  auto it = tags_.find(std::string(word));
  return it != tags_.end() && (it->second & static_cast<uint8_t>(tag)) != 0;
}

bool phrase_fits_alternating_meter(const std::vector<std::string>& words,
                                   const phonetics::PronunciationLexicon& lex) {
  if (words.empty()) return false;
  for (const auto& w : words)
    if (!lex.contains(w)) return false;

  // DFS over pronunciation choices; test both parities of the infinite
  // alternating pattern, since the phrase's line offset is unknown here.
  std::vector<StressMark> marks;
  auto dfs = [&](auto&& self, size_t wi) -> bool {
    if (wi == words.size()) {
      for (int parity = 0; parity < 2; ++parity) {
        bool ok = true;
        for (size_t i = 0; i < marks.size(); ++i) {
          StressMark want = ((i + static_cast<size_t>(parity)) % 2 == 0)
                                ? StressMark::Unstressed
                                : StressMark::Stressed;
          if (marks[i] != StressMark::Ambiguous && marks[i] != want) {
            ok = false;
            break;
          }
        }
        if (ok) return true;
      }
      return false;
    }
    for (const auto& pron : lex.lookup(words[wi])) {
      size_t before = marks.size();
      marks.insert(marks.end(), pron.stress.begin(), pron.stress.end());
      if (self(self, wi + 1)) return true;
      marks.resize(before);
    }
    return false;
  };
  return dfs(dfs, 0);
}

sketch::Sketch apply_imagery(const sketch::Sketch& sk, const ImageryTable& tbl,
                             const PosLexicon& pos,
                             const phonetics::PronunciationLexicon& lex,
                             int max_repl, RandomSource& rng) {
  sketch::Sketch out = sk;
  if (tbl.empty() || max_repl <= 0) return out;

  std::set<std::string> rhyme_words;
  for (const auto& line : out.lines)
    if (!line.rhyme_word.empty()) rhyme_words.insert(line.rhyme_word);

  auto nouns = tagged_slots(out, pos, PosTag::Noun);
  std::erase_if(nouns, [&](const Slot& s) {
    return rhyme_words.count(
               out.lines[s.line].content_words[s.index]) > 0;
  });

  struct Replacement {
    double confidence;
    Slot slot;
    std::string imagery;
  };
  std::vector<Replacement> found;
  for (const Slot& s : sample_slots(nouns, kSampleSize, rng)) {
    const std::string& noun = out.lines[s.line].content_words[s.index];
    const auto* rows = tbl.find(noun);
    if (!rows) continue;
    for (const auto& [imagery, conf] : *rows) {
      if (imagery == noun) continue;
      if (!lex.contains(imagery)) continue;  // decoder precondition
      found.push_back({conf, s, imagery});
      break;  // rows are confidence-sorted; best usable row only
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) {
                     return a.confidence > b.confidence;
                   });
  if (static_cast<int>(found.size()) > max_repl) found.resize(max_repl);
  for (const auto& r : found)
    out.lines[r.slot.line].content_words[r.slot.index] = r.imagery;
  return out;
}

sketch::Sketch apply_similes(const sketch::Sketch& sk, const SimileTable& tbl,
                             const PosLexicon& pos,
                             const phonetics::PronunciationLexicon& lex,
                             int max_add, RandomSource& rng) {
  sketch::Sketch out = sk;
  if (tbl.empty() || max_add <= 0) return out;

  auto adjectives = tagged_slots(out, pos, PosTag::Adjective);

  struct Candidate {
    double confidence;
    Slot slot;
    std::vector<std::string> phrase;
  };
  std::vector<Candidate> found;
  for (const Slot& s : sample_slots(adjectives, kSampleSize, rng)) {
    const std::string& adj = out.lines[s.line].content_words[s.index];
    const auto* rows = tbl.find(adj);
    if (!rows) continue;
    for (const auto& [vehicle, conf] : *rows) {
      std::vector<std::string> phrase{adj, "like"};
      for (auto& w : text::tokenize(vehicle)) phrase.push_back(std::move(w));
      if (phrase.size() < 3) continue;
      if (!phrase_fits_alternating_meter(phrase, lex)) continue;
      found.push_back({conf, s, std::move(phrase)});
      break;  // most confident surviving vehicle for this adjective
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) {
                     return a.confidence > b.confidence;
                   });
  if (static_cast<int>(found.size()) > max_add) found.resize(max_add);
  for (auto& c : found) {
    out.lines[c.slot.line].fixed_phrases.push_back(
        {std::move(c.phrase), static_cast<int>(c.slot.index)});
  }
  return out;
}

}  // namespace sonneteer::polish
