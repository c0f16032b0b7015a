// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/sketch.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sonneteer::sketch {

using json = nlohmann::ordered_json;

std::array<int, kLineCount> slot_counts(const meter::RhymeScheme& scheme) {
  std::array<int, kLineCount> counts;
  counts.fill(2);
  for (int idx : meter::initial_rhyme_lines(scheme)) counts[idx - 1] = 3;
  return counts;
}

void validate_layout(const Sketch& sk, const meter::RhymeScheme& scheme,
                     bool before_rhyme) {
  auto counts = slot_counts(scheme);
  for (int i = 0; i < kLineCount; ++i) {
    const auto& line = sk.lines[static_cast<size_t>(i)];
    int expected = before_rhyme ? counts[static_cast<size_t>(i)] : 2;
    if (static_cast<int>(line.content_words.size()) != expected)
      throw ValidationError("line " + std::to_string(i + 1) + " carries " +
                            std::to_string(line.content_words.size()) +
                            " content words, expected " +
                            std::to_string(expected));
    if (before_rhyme && !line.rhyme_word.empty())
      throw ValidationError("line " + std::to_string(i + 1) +
                            " already has a rhyme word");
    if (!before_rhyme && line.rhyme_word.empty())
      throw ValidationError("line " + std::to_string(i + 1) +
                            " is missing its rhyme word");
  }
}

std::string to_json(const Sketch& sk) {
  json j;
  j["version"] = 1;
  j["title"] = sk.title;
  json lines = json::array();
  for (const auto& line : sk.lines) {
    json jl;
    jl["content_words"] = line.content_words;
    jl["rhyme_word"] = line.rhyme_word;
    json phrases = json::array();
    for (const auto& fp : line.fixed_phrases) {
      phrases.push_back(json{{"words", fp.words}, {"anchor", fp.anchor}});
    }
    jl["fixed_phrases"] = phrases;
    if (!line.rhyme_provenance.empty())
      jl["rhyme_provenance"] = line.rhyme_provenance;
    lines.push_back(std::move(jl));
  }
  j["lines"] = lines;
  return j.dump(2) + "\n";
}

Sketch from_json(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ParseError("sketch file is not valid JSON");
  Sketch sk;
  sk.title = j.at("title").get<std::string>();
  const auto& lines = j.at("lines");
  if (lines.size() != kLineCount)
    throw ValidationError("sketch must have 14 lines, got " +
                          std::to_string(lines.size()));
  for (size_t i = 0; i < kLineCount; ++i) {
    const auto& jl = lines[i];
    LineSketch& line = sk.lines[i];
    line.content_words = jl.at("content_words").get<std::vector<std::string>>();
    line.rhyme_word = jl.at("rhyme_word").get<std::string>();
    for (const auto& jp : jl.at("fixed_phrases")) {
      FixedPhrase fp;
      fp.words = jp.at("words").get<std::vector<std::string>>();
      fp.anchor = jp.at("anchor").get<int>();
      line.fixed_phrases.push_back(std::move(fp));
    }
    if (jl.contains("rhyme_provenance"))
      line.rhyme_provenance = jl.at("rhyme_provenance").get<std::string>();
  }
  return sk;
}

void save_json(const Sketch& sk, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write sketch: " + path.string());
  out << to_json(sk);
}

Sketch load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open sketch: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

struct WordScore {
  double score = 0.0;
  size_t first_pos = 0;  // first occurrence in the document token stream
};

/// Document-wide RAKE word scores: candidate phrases are maximal runs of
/// non-stopword tokens unbroken by punctuation; score(w) = degree / frequency.
std::map<std::string, WordScore> rake_scores(
    const std::vector<std::vector<text::MarkedToken>>& lines,
    const text::Stopwords& stop) {
  std::map<std::string, double> freq, degree;
  std::map<std::string, size_t> first_pos;
  size_t pos = 0;

  for (const auto& line : lines) {
    std::vector<std::string> phrase;
    auto flush = [&]() {
      for (const auto& w : phrase) {
        freq[w] += 1.0;
        degree[w] += static_cast<double>(phrase.size());
      }
      phrase.clear();
    };
    for (const auto& tok : line) {
      if (tok.break_before) flush();
      if (stop.contains(tok.word)) {
        flush();
      } else {
        if (!first_pos.count(tok.word)) first_pos[tok.word] = pos;
        phrase.push_back(tok.word);
      }
      ++pos;
    }
    flush();
  }

  std::map<std::string, WordScore> out;
  for (const auto& [w, f] : freq)
    out[w] = WordScore{degree[w] / f, first_pos[w]};
  return out;
}

std::vector<std::string> ranked_line_words(
    const std::vector<text::MarkedToken>& line,
    const std::map<std::string, WordScore>& scores) {
  std::set<std::string> seen;
  std::vector<std::pair<WordScore, std::string>> scored;
  for (const auto& tok : line) {
    auto it = scores.find(tok.word);
    if (it == scores.end()) continue;  // stopword
    if (!seen.insert(tok.word).second) continue;
    scored.emplace_back(it->second, tok.word);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first.score != b.first.score) return a.first.score > b.first.score;
    return a.first.first_pos < b.first.first_pos;
  });
  std::vector<std::string> out;
  for (auto& [s, w] : scored) out.push_back(std::move(w));
  return out;
}

}  // namespace

RakeRanking rake_ranking(const std::vector<std::string>& lines,
                         const text::Stopwords& stop) {
  std::vector<std::vector<text::MarkedToken>> marked;
  marked.reserve(lines.size());
  for (const auto& l : lines) marked.push_back(text::tokenize_marked(l));

  auto scores = rake_scores(marked, stop);

  RakeRanking ranking;
  for (const auto& line : marked)
    ranking.per_line.push_back(ranked_line_words(line, scores));

  std::vector<std::pair<WordScore, std::string>> all;
  for (const auto& [w, s] : scores) all.emplace_back(s, w);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.first.score != b.first.score) return a.first.score > b.first.score;
    return a.first.first_pos < b.first.first_pos;
  });
  for (auto& [s, w] : all) ranking.document.push_back(std::move(w));
  return ranking;
}

std::vector<std::vector<std::string>> extract_keywords(
    const std::vector<std::string>& lines, const text::Stopwords& stop) {
  if (lines.empty()) throw ValidationError("no lines to extract keywords from");
  RakeRanking ranking = rake_ranking(lines, stop);
  std::vector<std::vector<std::string>> out;
  for (auto& ranked : ranking.per_line) {
    if (ranked.size() > 3) ranked.resize(3);
    out.push_back(std::move(ranked));
  }
  return out;
}

std::string serialize_masked_prompt(std::string_view title,
                                    const std::array<int, kLineCount>& counts) {
  std::ostringstream out;
  out << "Title: " << title << " . |||";
  for (int i = 0; i < kLineCount; ++i) {
    int n = counts[static_cast<size_t>(i)];
    if (n != 2 && n != 3)
      throw ValidationError("line " + std::to_string(i + 1) +
                            ": keyword slot count must be 2 or 3");
    out << " Line " << (i + 1) << ": ";
    for (int k = 0; k < n; ++k) out << "[MASK] ";
    out << "|||";
  }
  return out.str();
}

namespace {

std::vector<std::string> split_segments(std::string_view body) {
  std::vector<std::string> segments;
  size_t start = 0;
  while (start <= body.size()) {
    size_t bar = body.find("|||", start);
    if (bar == std::string_view::npos) {
      std::string tail(body.substr(start));
      if (tail.find_first_not_of(" \t\r\n") != std::string::npos)
        segments.emplace_back(std::move(tail));
      break;
    }
    segments.emplace_back(body.substr(start, bar - start));
    start = bar + 3;
  }
  return segments;
}

std::string strip(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Parses "Line {i}: w1 w2 ..." returning the words. Throws on bad headers.
std::vector<std::string> parse_line_segment(const std::string& segment,
                                            int expected_index) {
  std::istringstream in(segment);
  std::string kw, num;
  in >> kw >> num;
  if (kw != "Line" || num != std::to_string(expected_index) + ":")
    throw ParseError("expected 'Line " + std::to_string(expected_index) +
                     ":', got '" + strip(segment) + "'");
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

}  // namespace

MaskedPrompt parse_masked_prompt(std::string_view body) {
  auto segments = split_segments(body);
  if (segments.size() != kLineCount + 1)
    throw ParseError("masked prompt must contain a title and 14 line blocks");
  std::string head = strip(segments[0]);
  if (head.rfind("Title: ", 0) != 0 || head.size() < 9 ||
      head.substr(head.size() - 2) != " .")
    throw ParseError("masked prompt must begin 'Title: {title} .'");
  MaskedPrompt prompt;
  prompt.title = strip(head.substr(7, head.size() - 9));
  for (int i = 0; i < kLineCount; ++i) {
    auto words = parse_line_segment(segments[static_cast<size_t>(i + 1)], i + 1);
    for (const auto& w : words)
      if (w != "[MASK]")
        throw ParseError("line " + std::to_string(i + 1) +
                         ": expected [MASK], got '" + w + "'");
    int n = static_cast<int>(words.size());
    if (n != 2 && n != 3)
      throw ParseError("line " + std::to_string(i + 1) +
                       ": mask count must be 2 or 3, got " + std::to_string(n));
    prompt.counts[static_cast<size_t>(i)] = n;
  }
  return prompt;
}

std::string serialize_keyword_output(
    const std::array<std::vector<std::string>, kLineCount>& keywords) {
  std::ostringstream out;
  for (int i = 0; i < kLineCount; ++i) {
    if (i > 0) out << ' ';
    out << "Line " << (i + 1) << ": ";
    for (const auto& w : keywords[static_cast<size_t>(i)]) out << w << ' ';
    out << "|||";
  }
  return out.str();
}

std::array<std::vector<std::string>, kLineCount> parse_keyword_output(
    std::string_view body) {
  if (strip(body).empty()) throw ParseError("keyword output is empty");
  auto segments = split_segments(body);
  if (segments.size() != kLineCount)
    throw ParseError("keyword output must contain 14 line blocks, got " +
                     std::to_string(segments.size()));
  std::array<std::vector<std::string>, kLineCount> out;
  for (int i = 0; i < kLineCount; ++i)
    out[static_cast<size_t>(i)] =
        parse_line_segment(segments[static_cast<size_t>(i)], i + 1);
  return out;
}

std::array<std::vector<std::string>, kLineCount> parse_keyword_output(
    std::string_view body, const std::array<int, kLineCount>& expected) {
  auto lists = parse_keyword_output(body);
  for (int i = 0; i < kLineCount; ++i) {
    if (static_cast<int>(lists[static_cast<size_t>(i)].size()) !=
        expected[static_cast<size_t>(i)])
      throw ParseError("line " + std::to_string(i + 1) + ": expected " +
                       std::to_string(expected[static_cast<size_t>(i)]) +
                       " keywords, got " +
                       std::to_string(lists[static_cast<size_t>(i)].size()));
  }
  return lists;
}

RetrievalPlanner::RetrievalPlanner(const text::Corpus& corpus,
                                   const phonetics::PronunciationLexicon& lex,
                                   const text::Stopwords& stop)
    : corpus_(&corpus), lex_(&lex), stop_(&stop) {
  if (corpus.docs.empty()) throw PlannerError("planner corpus is empty");
}

std::array<std::vector<std::string>, kLineCount> RetrievalPlanner::plan(
    std::string_view title, const std::array<int, kLineCount>& counts) {
  // Highest title-token overlap, earliest document on ties.
  std::vector<std::string> title_tokens = text::tokenize(title);
  std::set<std::string> title_set(title_tokens.begin(), title_tokens.end());
  size_t best_doc = 0;
  size_t best_overlap = 0;
  for (size_t d = 0; d < corpus_->docs.size(); ++d) {
    std::set<std::string> doc_words;
    for (const auto& line : corpus_->docs[d].lines)
      for (auto& w : text::tokenize(line)) doc_words.insert(std::move(w));
    size_t overlap = 0;
    for (const auto& t : title_set) overlap += doc_words.count(t);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best_doc = d;
    }
  }

  // First 14 lines, cycling shorter documents.
  const auto& doc = corpus_->docs[best_doc];
  std::vector<std::string> lines;
  for (int i = 0; i < kLineCount; ++i)
    lines.push_back(doc.lines[static_cast<size_t>(i) % doc.lines.size()]);

  RakeRanking ranking = rake_ranking(lines, *stop_);

  std::array<std::vector<std::string>, kLineCount> out;
  for (int i = 0; i < kLineCount; ++i) {
    const int want = counts[static_cast<size_t>(i)];
    auto& slot = out[static_cast<size_t>(i)];
    std::set<std::string> used;
    auto take = [&](const std::vector<std::string>& ranked) {
      for (const auto& w : ranked) {
        if (static_cast<int>(slot.size()) >= want) break;
        if (used.count(w)) continue;
        if (!lex_->contains(w)) continue;  // decoder precondition
        slot.push_back(w);
        used.insert(w);
      }
    };
    take(ranking.per_line[static_cast<size_t>(i)]);
    take(ranking.document);  // backfill from next-ranked words
    if (static_cast<int>(slot.size()) < want)
      throw PlannerError("line " + std::to_string(i + 1) +
                         ": corpus document cannot fill " +
                         std::to_string(want) + " keyword slots");
  }
  return out;
}

Sketch plan_with(KeywordPlanner& planner, std::string_view title,
                 const meter::RhymeScheme& scheme) {
  auto counts = slot_counts(scheme);
  auto keywords = planner.plan(title, counts);
  for (int i = 0; i < kLineCount; ++i) {
    if (static_cast<int>(keywords[static_cast<size_t>(i)].size()) !=
        counts[static_cast<size_t>(i)])
      throw PlannerError("planner returned " +
                         std::to_string(keywords[static_cast<size_t>(i)].size()) +
                         " keywords for line " + std::to_string(i + 1) +
                         ", expected " +
                         std::to_string(counts[static_cast<size_t>(i)]));
  }
  Sketch sk;
  sk.title = std::string(title);
  for (int i = 0; i < kLineCount; ++i)
    sk.lines[static_cast<size_t>(i)].content_words =
        std::move(keywords[static_cast<size_t>(i)]);
  return sk;
}

Sketch plan_reference(std::string_view title,
                      const phonetics::PronunciationLexicon& lex,
                      const text::Corpus& corpus, const text::Stopwords& stop,
                      const meter::RhymeScheme& scheme) {
  RetrievalPlanner planner(corpus, lex, stop);
  return plan_with(planner, title, scheme);
}

}  // namespace sonneteer::sketch
