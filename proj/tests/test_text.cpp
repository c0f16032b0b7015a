// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "sonneteer/text.hpp"
#include "test_util.hpp"

using namespace sonneteer;

TEST_CASE("normalize_word strips punctuation and lowercases") {
  CHECK(text::normalize_word("Hello,") == "hello");
  CHECK(text::normalize_word("\"Quoth\"") == "quoth");
  CHECK(text::normalize_word("don't") == "don't");
  CHECK(text::normalize_word("...") == "");
  CHECK(text::normalize_word("O'Malley!") == "o'malley");
}

TEST_CASE("tokenize splits hyphens and drops punctuation") {
  auto toks = text::tokenize("The ice-cold wind, so bitter!");
  CHECK(toks == std::vector<std::string>{"the", "ice", "cold", "wind", "so",
                                         "bitter"});
  CHECK(text::tokenize("").empty());
  CHECK(text::tokenize("  , . !  ").empty());
}

TEST_CASE("tokenize_marked records phrase breaks at punctuation") {
  auto toks = text::tokenize_marked("green leaves, tall trees");
  REQUIRE(toks.size() == 4);
  CHECK_FALSE(toks[0].break_before);
  CHECK_FALSE(toks[1].break_before);
  CHECK(toks[2].break_before);  // comma separates the phrases
  CHECK_FALSE(toks[3].break_before);

  auto hyphen = text::tokenize_marked("ice-cold wind");
  REQUIRE(hyphen.size() == 3);
  CHECK_FALSE(hyphen[1].break_before);  // hyphen is not a phrase break
}

TEST_CASE("split_sentences breaks on newlines and final punctuation") {
  auto s = text::split_sentences("The sun rose. The birds sang!\nA new day");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == std::vector<std::string>{"the", "sun", "rose"});
  CHECK(s[1] == std::vector<std::string>{"the", "birds", "sang"});
  CHECK(s[2] == std::vector<std::string>{"a", "new", "day"});
}

TEST_CASE("stopwords load and match") {
  const auto& stop = testutil::stopwords();
  CHECK(stop.contains("the"));
  CHECK(stop.contains("from"));
  CHECK(stop.contains("would"));
  CHECK_FALSE(stop.contains("leaves"));
  CHECK_FALSE(stop.contains("winter"));
}

TEST_CASE("corpus loads blank-line separated documents") {
  std::istringstream in("line one\nline two\n\nsecond doc\nwith lines\n\n\n");
  auto corpus = text::Corpus::load(in);
  REQUIRE(corpus.docs.size() == 2);
  CHECK(corpus.docs[0].lines.size() == 2);
  CHECK(corpus.docs[1].lines.size() == 2);
}

TEST_CASE("corpus length filter keeps 8..50 line documents") {
  text::Corpus corpus;
  for (size_t n : {5u, 8u, 20u, 50u, 51u}) {
    text::Document d;
    for (size_t i = 0; i < n; ++i) d.lines.push_back("a line of text here");
    corpus.docs.push_back(d);
  }
  size_t dropped = corpus.filter_by_length(8, 50);
  CHECK(dropped == 2);
  REQUIRE(corpus.docs.size() == 3);
  CHECK(corpus.docs[0].lines.size() == 8);
  CHECK(corpus.docs[2].lines.size() == 50);
}

TEST_CASE("shipped corpus documents all survive the length filter") {
  auto corpus =
      text::Corpus::load_path(testutil::repo_root() / "data" / "corpus");
  size_t before = corpus.docs.size();
  CHECK(before >= 20);
  CHECK(corpus.filter_by_length(8, 50) == 0);
}
