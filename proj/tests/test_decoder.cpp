// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "sonneteer/decoder.hpp"
#include "test_util.hpp"

using namespace sonneteer;
using meter::TemplateKind;

namespace {

using LineSet = std::set<std::pair<TemplateKind, std::vector<std::string>>>;

/// Brute-force oracle: enumerates every left-to-right tiling of the template,
/// then filters for the rhyme word at the end, the required content words,
/// and the no-repeat-trigram rule. Completely independent of the beam search.
void oracle_enumerate(const meter::StressTemplate& tpl,
                      const phonetics::PronunciationLexicon& lex,
                      const std::vector<std::string>& vocab,
                      const std::string& rhyme_word,
                      const std::vector<std::string>& content,
                      int no_repeat_size, LineSet& out) {
  std::vector<std::string> words;
  auto has_repeat = [&](const std::vector<std::string>& line) {
    if (no_repeat_size <= 0) return false;
    size_t n = static_cast<size_t>(no_repeat_size);
    if (line.size() < n) return false;
    std::set<std::vector<std::string>> seen;
    for (size_t i = 0; i + n <= line.size(); ++i) {
      std::vector<std::string> ngram(line.begin() + static_cast<long>(i),
                                     line.begin() + static_cast<long>(i + n));
      if (!seen.insert(ngram).second) return true;
    }
    return false;
  };
  auto rec = [&](auto&& self, size_t pos) -> void {
    if (pos == tpl.length()) {
      if (words.empty() || words.back() != rhyme_word) return;
      for (const auto& c : content) {
        if (std::count(words.begin(), words.end(), c) == 0) return;
      }
      if (has_repeat(words)) return;
      out.insert({tpl.kind, words});
      return;
    }
    for (const auto& w : vocab) {
      for (const auto& pron : lex.lookup(w)) {
        size_t k = static_cast<size_t>(pron.syllable_count());
        if (pos + k > tpl.length()) continue;
        std::span<const phonetics::StressMark> slots(tpl.marks.data() + pos, k);
        if (!meter::pattern_matches(pron.stress, slots)) continue;
        words.push_back(w);
        self(self, pos + k);
        words.pop_back();
        // Other pronunciations explored too; the result set dedupes.
      }
    }
  };
  rec(rec, 0);
}

phonetics::PronunciationLexicon oracle_lexicon() {
  phonetics::PronunciationLexicon lex;
  lex.add("sun", "S AH1 N");            // A
  lex.add("night", "N AY1 T");          // A
  lex.add("below", "B IH0 L OW1");      // U S
  lex.add("delight", "D IH0 L AY1 T");  // U S
  lex.add("return", "R IH0 T ER1 N");   // U S
  lex.add("sudden", "S AH1 D AH0 N");   // S U
  lex.add("winter", "W IH1 N T ER0");   // S U
  lex.add("remember", "R IH0 M EH1 M B ER0");  // U S U
  return lex;
}

lm::ReverseNGramModel oracle_model() {
  return lm::ReverseNGramModel::train(
      {{"sun", "below", "night", "return"},
       {"winter", "night", "delight"},
       {"remember", "sudden", "sun"},
       {"night", "below", "winter", "return"}},
      3, 0.75);
}

}  // namespace

TEST_CASE("generate_line meets every stated constraint") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  sketch::LineSketch ls;
  ls.content_words = {"winter", "delight"};
  ls.rhyme_word = "return";
  decoder::DecodeParams params;
  decoder::PoemState poem(params.sampler.no_repeat_ngram_size);
  RandomSource rng(5);

  auto line = decoder::generate_line(ls, poem, model, lex, params, rng);
  REQUIRE_FALSE(line.words.empty());
  CHECK(line.words.back() == "return");
  CHECK(std::count(line.words.begin(), line.words.end(), "winter") >= 1);
  CHECK(std::count(line.words.begin(), line.words.end(), "delight") >= 1);
  auto scan = meter::scan_line(line.words, lex);
  REQUIRE(scan.matched.has_value());
  CHECK_FALSE(line.relaxed);
}

TEST_CASE("monosyllable-only search yields exactly ten tokens") {
  phonetics::PronunciationLexicon lex;
  for (const char* entry :
       {"sun|S AH1 N", "moon|M UW1 N", "night|N AY1 T", "cold|K OW1 L D",
        "snow|S N OW1", "wind|W IH1 N D", "light|L AY1 T", "day|D EY1",
        "sea|S IY1", "rain|R EY1 N"}) {
    std::string s(entry);
    auto bar = s.find('|');
    lex.add(s.substr(0, bar), s.substr(bar + 1));
  }
  auto model = lm::ReverseNGramModel::train(
      {{"sun", "moon", "night", "cold", "snow"},
       {"wind", "light", "day", "sea", "rain"},
       {"rain", "snow", "wind", "sun", "day"}},
      3, 0.75);
  sketch::LineSketch ls;
  ls.rhyme_word = "day";
  decoder::DecodeParams params;
  decoder::PoemState poem(3);
  RandomSource rng(8);
  auto line = decoder::generate_line(ls, poem, model, lex, params, rng);
  CHECK(line.words.size() == 10);  // every word fills exactly one slot
  CHECK(line.words.back() == "day");
}

TEST_CASE("generate_line is deterministic for a fixed seed") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  sketch::LineSketch ls;
  ls.content_words = {"sudden"};
  ls.rhyme_word = "delight";
  decoder::DecodeParams params;

  std::vector<std::string> first, second;
  {
    decoder::PoemState poem(3);
    RandomSource rng(9);
    first = decoder::generate_line(ls, poem, model, lex, params, rng).words;
  }
  {
    decoder::PoemState poem(3);
    RandomSource rng(9);
    second = decoder::generate_line(ls, poem, model, lex, params, rng).words;
  }
  CHECK(first == second);
}

TEST_CASE("feminine template: trailing slack maps to slot 11") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  sketch::LineSketch ls;
  ls.content_words = {};
  ls.rhyme_word = "winter";  // (S U): only viable as a feminine ending
  decoder::DecodeParams params;
  decoder::PoemState poem(3);
  RandomSource rng(2);
  auto line = decoder::generate_line(ls, poem, model, lex, params, rng);
  CHECK(line.matched == TemplateKind::Feminine);
  CHECK(line.words.back() == "winter");
  auto scan = meter::scan_line(line.words, lex);
  REQUIRE(scan.matched == TemplateKind::Feminine);
  size_t total = 0;
  for (const auto& slots : scan.word_slots) total += slots.size();
  CHECK(total == 11);
}

TEST_CASE("line errors: missing or unviable rhyme word") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  decoder::DecodeParams params;
  decoder::PoemState poem(3);
  RandomSource rng(1);

  sketch::LineSketch no_rhyme;
  no_rhyme.content_words = {"sun"};
  CHECK_THROWS_AS(
      decoder::generate_line(no_rhyme, poem, model, lex, params, rng),
      LineError);

  sketch::LineSketch oov;
  oov.rhyme_word = "zzzqqq";
  CHECK_THROWS_AS(decoder::generate_line(oov, poem, model, lex, params, rng),
                  LineError);

  // "remember" ends (S U) after... U S U: final syllable U preceded by S is
  // viable for feminine; build a word that ends U U instead.
  phonetics::PronunciationLexicon lex2 = testutil::toy_lexicon();
  lex2.add("happily", "HH AE1 P AH0 L IY0");  // S U U: no template suffix
  sketch::LineSketch bad;
  bad.rhyme_word = "happily";
  CHECK_THROWS_AS(decoder::generate_line(bad, poem, model, lex2, params, rng),
                  LineError);
}

TEST_CASE("fixed phrases are emitted atomically") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  sketch::LineSketch ls;
  ls.content_words = {"bright", "night"};
  ls.fixed_phrases.push_back({{"bright", "like", "golden"}, 0});
  // "like" is not in the toy lexicon yet.
  phonetics::PronunciationLexicon lex2 = testutil::toy_lexicon();
  lex2.add("like", "L AY1 K");
  ls.rhyme_word = "return";
  decoder::DecodeParams params;
  decoder::PoemState poem(3);
  RandomSource rng(21);
  auto line = decoder::generate_line(ls, poem, model, lex2, params, rng);

  auto it = std::find(line.words.begin(), line.words.end(), "bright");
  REQUIRE(it != line.words.end());
  REQUIRE(it + 2 < line.words.end());
  CHECK(*(it + 1) == "like");
  CHECK(*(it + 2) == "golden");
  CHECK(std::count(line.words.begin(), line.words.end(), "night") >= 1);
  CHECK(meter::scan_line(line.words, lex2).matched.has_value());
}

TEST_CASE("generate_sonnet: all constraints, determinism, no-repeat") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  auto scheme = meter::RhymeScheme::shakespearean();

  sketch::Sketch sk;
  sk.title = "toy";
  const char* rhymes[14] = {"night", "return", "light", "below",
                            "sun",   "winter", "delight", "sudden",
                            "snow",  "moon",   "below",  "return",
                            "bright", "night"};
  for (int i = 0; i < 14; ++i) {
    sk.lines[static_cast<size_t>(i)].rhyme_word = rhymes[i];
    sk.lines[static_cast<size_t>(i)].content_words = {"cold"};
  }
  decoder::DecodeParams params;
  RandomSource rng(3);
  auto sonnet = decoder::generate_sonnet(sk, scheme, model, lex, params, rng);

  std::set<std::vector<std::string>> trigrams;
  for (const auto& line : sonnet.lines) {
    CHECK_FALSE(line.words.empty());
    CHECK(meter::scan_line(line.words, lex).matched.has_value());
    for (size_t i = 0; i + 3 <= line.words.size(); ++i) {
      std::vector<std::string> tg(line.words.begin() + static_cast<long>(i),
                                  line.words.begin() + static_cast<long>(i + 3));
      CHECK(trigrams.insert(tg).second);  // poem-level no-repeat
    }
  }

  RandomSource rng2(3);
  auto again = decoder::generate_sonnet(sk, scheme, model, lex, params, rng2);
  for (int i = 0; i < 14; ++i)
    CHECK(sonnet.lines[static_cast<size_t>(i)].words ==
          again.lines[static_cast<size_t>(i)].words);
}

TEST_CASE("generate_sonnet requires every rhyme word") {
  auto lex = testutil::toy_lexicon();
  auto model = testutil::toy_model();
  sketch::Sketch sk;
  sk.title = "toy";
  decoder::DecodeParams params;
  RandomSource rng(3);
  CHECK_THROWS_AS(decoder::generate_sonnet(sk, meter::RhymeScheme::shakespearean(),
                                           model, lex, params, rng),
                  SonnetError);
}

TEST_CASE("reachable lines equal the brute-force oracle") {
  auto lex = oracle_lexicon();
  auto model = oracle_model();
  std::vector<std::string> vocab = lex.words();

  sketch::LineSketch ls;
  ls.content_words = {"winter", "remember"};
  ls.rhyme_word = "return";

  decoder::PoemState poem(3);
  std::vector<TemplateKind> kinds = {TemplateKind::Standard,
                                     TemplateKind::InvertedFirstFoot};
  auto reachable = decoder::reachable_lines(ls, poem, model, lex, kinds);

  LineSet expected;
  for (const auto& tpl : meter::line_templates()) {
    if (tpl.kind == TemplateKind::Feminine) continue;
    oracle_enumerate(tpl, lex, vocab, "return", {"winter", "remember"}, 3,
                     expected);
  }
  REQUIRE_FALSE(expected.empty());
  CHECK(reachable.size() == expected.size());
  CHECK(reachable == expected);
}

TEST_CASE("poem state forbids words that recreate trigrams") {
  decoder::PoemState poem(3);
  poem.add_line({"the", "cold", "night", "falls"});
  CHECK(poem.seen({"the", "cold", "night"}));
  CHECK(poem.seen({"cold", "night", "falls"}));
  CHECK_FALSE(poem.seen({"night", "falls", "the"}));  // never crosses lines
  auto forbidden = poem.forbidden_before({"cold", "night"});
  REQUIRE(forbidden.size() == 1);
  CHECK(forbidden[0] == "the");
}
