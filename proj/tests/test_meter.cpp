// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "sonneteer/meter.hpp"
#include "test_util.hpp"

using namespace sonneteer;
using meter::TemplateKind;
using phonetics::StressMark;

namespace {

std::string marks_str(const std::vector<StressMark>& marks) {
  std::string s;
  for (auto m : marks) s.push_back(static_cast<char>(m));
  return s;
}

std::vector<std::string> read_fixture_lines(const std::string& name) {
  std::ifstream in(testutil::fixture(name));
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("line_templates emits exactly the three patterns in fixed order") {
  const auto& tpls = meter::line_templates();
  REQUIRE(tpls.size() == 3);
  CHECK(tpls[0].kind == TemplateKind::Standard);
  CHECK(marks_str(tpls[0].marks) == "USUSUSUSUS");
  CHECK(tpls[1].kind == TemplateKind::InvertedFirstFoot);
  CHECK(marks_str(tpls[1].marks) == "SUUSUSUSUS");
  CHECK(tpls[2].kind == TemplateKind::Feminine);
  CHECK(marks_str(tpls[2].marks) == "USUSUSUSUSU");
  CHECK(tpls[2].length() == 11);
}

TEST_CASE("word_fits honors exact slices and ambiguity") {
  const auto& lex = testutil::cmu();
  std::vector<StressMark> us = {StressMark::Unstressed, StressMark::Stressed};
  std::vector<StressMark> su = {StressMark::Stressed, StressMark::Unstressed};
  std::vector<StressMark> s = {StressMark::Stressed};

  CHECK(meter::word_fits(us, "sudden", lex) == nullptr);
  CHECK(meter::word_fits(su, "sudden", lex) != nullptr);
  CHECK(meter::word_fits(s, "fall", lex) != nullptr);  // ambiguous matches
  CHECK_THROWS_AS(meter::word_fits(s, "zzzqqq", lex), LookupError);
}

TEST_CASE("scan_line: monosyllable counting rules") {
  const auto& lex = testutil::cmu();
  std::vector<std::string> ten(10, "day");
  // All-ambiguous words would repeat, so vary the words.
  ten = {"the", "sun", "comes", "up", "to", "light", "the", "new", "spring",
         "day"};
  auto r10 = meter::scan_line(ten, lex);
  CHECK(r10.matched == TemplateKind::Standard);

  std::vector<std::string> eleven = ten;
  eleven.push_back("now");
  CHECK(meter::scan_line(eleven, lex).matched == TemplateKind::Feminine);

  // Nine words that are monosyllabic in every pronunciation ("spring" has a
  // two-syllable alternate and cannot be used here).
  std::vector<std::string> nine = {"the", "sun", "comes", "up", "to",
                                   "light", "the", "new", "day"};
  CHECK_FALSE(meter::scan_line(nine, lex).matched.has_value());
}

TEST_CASE("scan_line reports unknown words distinctly") {
  const auto& lex = testutil::cmu();
  auto r = meter::scan_line({"the", "zzzqqq", "day"}, lex);
  CHECK_FALSE(r.matched.has_value());
  REQUIRE(r.unknown_words.size() == 1);
  CHECK(r.unknown_words[0] == "zzzqqq");
}

TEST_CASE("scan_line matched lines consume exactly 10 or 11 slots") {
  const auto& lex = testutil::cmu();
  auto check_total = [&](const std::vector<std::string>& words) {
    auto r = meter::scan_line(words, lex);
    if (!r.matched) return;
    size_t total = 0;
    for (const auto& slots : r.word_slots) total += slots.size();
    CHECK((total == 10 || total == 11));
  };
  check_total({"the", "winter", "moon", "is", "shining", "on", "the", "sea"});
  check_total({"a", "sudden", "storm", "will", "break", "the", "golden",
               "day"});
  check_total({"remember", "all", "the", "light", "below", "the", "hill"});
}

TEST_CASE("templates are exact-length: extending a matched line unmatches it") {
  const auto& lex = testutil::cmu();
  const std::vector<std::vector<std::string>> matched_lines = {
      {"the", "sun", "comes", "up", "to", "light", "the", "new", "spring",
       "day"},
      {"a", "sudden", "storm", "will", "break", "the", "golden", "day"},
      {"remember", "all", "the", "light", "below", "the", "hill"},
  };
  for (const auto& words : matched_lines) {
    auto before = meter::scan_line(words, lex);
    if (!before.matched) continue;
    for (const std::string extra : {"day", "below", "winter"}) {
      auto longer = words;
      longer.push_back(extra);
      auto after = meter::scan_line(longer, lex);
      // The same template can never match again; only a strictly longer
      // template may absorb the extra word.
      if (after.matched) {
        CHECK(after.matched != before.matched);
        size_t before_len = 0, after_len = 0;
        for (const auto& t : meter::line_templates()) {
          if (t.kind == *before.matched) before_len = t.length();
          if (t.kind == *after.matched) after_len = t.length();
        }
        CHECK(after_len > before_len);
      }
    }
  }
}

TEST_CASE("viable_line_ending accepts iambic endings, rejects double-slack") {
  const auto& lex = testutil::cmu();
  CHECK(meter::viable_line_ending("day", lex));       // monosyllable
  CHECK(meter::viable_line_ending("delight", lex));   // (U S)
  CHECK(meter::viable_line_ending("winter", lex));    // (S U) feminine
  CHECK_FALSE(meter::viable_line_ending("happily", lex));  // (S U U)
}

TEST_CASE("rhyme scheme parsing and presets") {
  auto shake = meter::RhymeScheme::parse("shakespearean");
  CHECK(shake.letters() == "ABABCDCDEFEFGG");
  auto petra = meter::RhymeScheme::parse("petrarchan");
  CHECK(petra.letters() == "ABBAABBACDECDE");
  auto custom = meter::RhymeScheme::parse("aabbccddeeffgg");
  CHECK(custom.letters() == "AABBCCDDEEFFGG");

  CHECK_THROWS_AS(meter::RhymeScheme::parse("ABAB"), ValidationError);
  CHECK_THROWS_AS(meter::RhymeScheme::parse("ABABCDCDEFEFGX"),
                  ValidationError);  // X occurs once
  CHECK_THROWS_AS(meter::RhymeScheme::parse("ABABCDCDEFEF3G"),
                  ValidationError);
}

TEST_CASE("initial_rhyme_lines reproduces the documented index lists") {
  CHECK(meter::initial_rhyme_lines(meter::RhymeScheme::shakespearean()) ==
        std::vector<int>{1, 2, 5, 6, 9, 10, 13});
  CHECK(meter::initial_rhyme_lines(meter::RhymeScheme::petrarchan()) ==
        std::vector<int>{1, 2, 9, 10, 11});
  CHECK(meter::initial_rhyme_lines(meter::RhymeScheme::parse(
            "AABBCCDDEEFFGG")) ==
        std::vector<int>{1, 3, 5, 7, 9, 11, 13});
}

TEST_CASE("letter_pairs counts match the combinatorial oracle") {
  auto count_pairs = [](const std::string& letters) {
    // Brute-force oracle: sum over letters of C(k, 2).
    int total = 0;
    for (char c = 'A'; c <= 'Z'; ++c) {
      int k = static_cast<int>(std::count(letters.begin(), letters.end(), c));
      total += k * (k - 1) / 2;
    }
    return total;
  };
  auto shake = meter::RhymeScheme::shakespearean();
  CHECK(shake.letter_pairs().size() ==
        static_cast<size_t>(count_pairs(shake.letters())));
  CHECK(shake.letter_pairs().size() == 7);
  auto petra = meter::RhymeScheme::petrarchan();
  CHECK(petra.letter_pairs().size() ==
        static_cast<size_t>(count_pairs(petra.letters())));
  CHECK(petra.letter_pairs().size() == 15);
}

TEST_CASE("initial_rhyme_lines is strictly increasing with one entry per letter") {
  for (const auto* spec : {"ABABCDCDEFEFGG", "ABBAABBACDECDE", "AABBAABBCCDDCC"}) {
    auto scheme = meter::RhymeScheme::parse(spec);
    auto init = meter::initial_rhyme_lines(scheme);
    std::set<char> letters(scheme.letters().begin(), scheme.letters().end());
    CHECK(init.size() == letters.size());
    for (size_t i = 1; i < init.size(); ++i) CHECK(init[i] > init[i - 1]);
  }
}

TEST_CASE("check_sonnet_format: perfect fixture scores 100/100/100") {
  const auto& lex = testutil::cmu();
  auto lines = read_fixture_lines("perfect_sonnet.txt");
  auto report = meter::check_sonnet_format(
      lines, meter::RhymeScheme::shakespearean(), lex);
  CHECK(report.rhyme_pct == doctest::Approx(100.0));
  CHECK(report.meter_pct == doctest::Approx(100.0));
  CHECK(report.syllable_pct == doctest::Approx(100.0));
  CHECK(report.rhyme_total == 7);
}

TEST_CASE("check_sonnet_format: one broken pair scores 6/7") {
  const auto& lex = testutil::cmu();
  auto lines = read_fixture_lines("broken_rhyme_sonnet.txt");
  auto report = meter::check_sonnet_format(
      lines, meter::RhymeScheme::shakespearean(), lex);
  CHECK(report.rhyme_ok == 6);
  CHECK(report.rhyme_total == 7);
  CHECK(report.rhyme_pct == doctest::Approx(100.0 * 6 / 7));
}

TEST_CASE("check_sonnet_format: unknown words fail meter, syllable and rhyme") {
  const auto& lex = testutil::cmu();
  auto lines = read_fixture_lines("perfect_sonnet.txt");
  lines[0] = "the sun comes up to light the new zzzqqq";
  auto report = meter::check_sonnet_format(
      lines, meter::RhymeScheme::shakespearean(), lex);
  CHECK(report.lines[0].meter_ok == false);
  CHECK(report.lines[0].syllable_ok == false);
  CHECK(report.pairs[0].ok == false);  // line 1 is line-final in pair 1-3
  CHECK(report.pairs[0].kind == "unknown-word");
}

TEST_CASE("check_sonnet_format requires 14 lines") {
  const auto& lex = testutil::cmu();
  std::vector<std::string> lines(13, "the sun comes up");
  CHECK_THROWS_AS(meter::check_sonnet_format(
                      lines, meter::RhymeScheme::shakespearean(), lex),
                  ValidationError);
}

TEST_CASE("identical line-final words do not count as a rhyme") {
  const auto& lex = testutil::cmu();
  auto lines = read_fixture_lines("perfect_sonnet.txt");
  lines[2] = "we walk the long path home the same spring day";  // day == day
  auto report = meter::check_sonnet_format(
      lines, meter::RhymeScheme::shakespearean(), lex);
  CHECK(report.pairs[0].ok == false);
  CHECK(report.pairs[0].kind == "identical");
}
