// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "sonneteer/phonetics.hpp"

namespace sonneteer::eval {

ImageabilityLexicon ImageabilityLexicon::load(std::istream& in) {
  ImageabilityLexicon lex;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("imageability line " + std::to_string(line_no) +
                       ": expected word<TAB>rating");
    double rating = 0.0;
    try {
      rating = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError("imageability line " + std::to_string(line_no) +
                       ": bad rating");
    }
    if (!std::isfinite(rating))
      throw ParseError("imageability line " + std::to_string(line_no) +
                       ": rating must be finite");
    lex.add(text::to_lower(line.substr(0, tab)), rating);
  }
  return lex;
}

ImageabilityLexicon ImageabilityLexicon::load_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open imageability lexicon: " + path.string());
  return load(in);
}

void ImageabilityLexicon::add(std::string_view word, double rating) {
  ratings_[std::string(word)] = rating;
}

std::optional<double> ImageabilityLexicon::find(std::string_view word) const {
  auto it = ratings_.find(std::string(word));
  if (it == ratings_.end()) return std::nullopt;
  return it->second;
}

Distinct2Result distinct_2(const std::vector<std::string>& lines) {
  Distinct2Result result;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& line : lines) {
    auto toks = text::tokenize(line);
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
      ++result.total;
      seen.insert({toks[i], toks[i + 1]});
    }
  }
  if (result.total == 0)
    throw MetricError("distinct-2 undefined: poem has no bigram");
  result.unique = static_cast<int>(seen.size());
  result.ratio = static_cast<double>(result.unique) / result.total;
  return result;
}

ImageabilityResult imageability(const std::vector<std::string>& lines,
                                const ImageabilityLexicon& img,
                                const text::Stopwords& stop) {
  double total = 0.0;
  int count = 0;
  for (const auto& line : lines) {
    for (const auto& tok : text::tokenize(line)) {
      if (stop.contains(tok)) continue;
      if (auto rating = img.find(tok)) {
        total += *rating;
        ++count;
      }
    }
  }
  if (count == 0)
    throw MetricError("imageability undefined: no scorable token");
  return {total / count, count};
}

namespace {

PoemRow score_poem(const std::vector<std::string>& poem,
                   const std::string& name, const meter::RhymeScheme& scheme,
                   const phonetics::PronunciationLexicon& lex,
                   const ImageabilityLexicon& img, const text::Stopwords& stop) {
  PoemRow row;
  row.name = name;
  try {
    row.format = meter::check_sonnet_format(poem, scheme, lex);
    auto d2 = distinct_2(poem);
    row.novelty.distinct2 = d2.ratio;
    row.novelty.bigrams_unique = d2.unique;
    row.novelty.bigrams_total = d2.total;
    auto im = imageability(poem, img, stop);
    row.novelty.imageability = im.mean;
    row.novelty.imageability_tokens = im.scored_tokens;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

BatchReport batch_report(const std::vector<std::vector<std::string>>& poems,
                         const std::vector<std::string>& names,
                         const meter::RhymeScheme& scheme,
                         const phonetics::PronunciationLexicon& lex,
                         const ImageabilityLexicon& img,
                         const text::Stopwords& stop, Execution mode) {
  if (poems.empty()) throw ValidationError("batch_report: no poems");
  BatchReport report;
  report.rows.resize(poems.size());

  auto name_of = [&](size_t i) {
    return i < names.size() ? names[i] : "poem-" + std::to_string(i + 1);
  };

  if (mode == Execution::Parallel) {
    const int64_t n = static_cast<int64_t>(poems.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < n; ++i) {
      size_t idx = static_cast<size_t>(i);
      report.rows[idx] =
          score_poem(poems[idx], name_of(idx), scheme, lex, img, stop);
    }
  } else {
    for (size_t i = 0; i < poems.size(); ++i)
      report.rows[i] = score_poem(poems[i], name_of(i), scheme, lex, img, stop);
  }

  for (const auto& row : report.rows) {
    if (!row.error.empty()) continue;
    report.rhyme_pct += row.format.rhyme_pct;
    report.meter_pct += row.format.meter_pct;
    report.syllable_pct += row.format.syllable_pct;
    report.distinct2 += row.novelty.distinct2 * 100.0;
    report.imageability += row.novelty.imageability;
    ++report.scored_poems;
  }
  if (report.scored_poems > 0) {
    report.rhyme_pct /= report.scored_poems;
    report.meter_pct /= report.scored_poems;
    report.syllable_pct /= report.scored_poems;
    report.distinct2 /= report.scored_poems;
    report.imageability /= report.scored_poems;
  }
  return report;
}

std::string render_table(const BatchReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << std::left << std::setw(24) << "poem" << std::right << std::setw(8)
      << "rhyme" << std::setw(8) << "meter" << std::setw(10) << "syllable"
      << std::setw(8) << "dist-2" << std::setw(8) << "img" << '\n';
  for (const auto& row : report.rows) {
    out << std::left << std::setw(24) << row.name << std::right;
    if (!row.error.empty()) {
      out << "  error: " << row.error << '\n';
      continue;
    }
    out << std::setw(8) << row.format.rhyme_pct << std::setw(8)
        << row.format.meter_pct << std::setw(10) << row.format.syllable_pct
        << std::setw(8) << row.novelty.distinct2 * 100.0 << std::setw(8)
        << std::setprecision(2) << row.novelty.imageability
        << std::setprecision(1) << '\n';
  }
  out << std::left << std::setw(24) << "aggregate" << std::right << std::setw(8)
      << report.rhyme_pct << std::setw(8) << report.meter_pct << std::setw(10)
      << report.syllable_pct << std::setw(8) << report.distinct2 << std::setw(8)
      << std::setprecision(2) << report.imageability << '\n';
  return out.str();
}

}  // namespace sonneteer::eval
