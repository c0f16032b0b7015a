// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "sonneteer/rhyme.hpp"
#include "test_util.hpp"

using namespace sonneteer;
using lm::WordId;
using sketch::kLineCount;

namespace {

lm::NextWordDistribution make_dist(size_t size,
                                   std::initializer_list<std::pair<int, double>>
                                       entries) {
  lm::NextWordDistribution d;
  d.probs.assign(size, 0.0);
  double assigned = 0.0;
  for (auto [id, p] : entries) {
    d.probs[static_cast<size_t>(id)] = p;
    assigned += p;
  }
  if (!d.probs.empty()) d.probs[0] += 1.0 - assigned;  // park the rest on id 0
  return d;
}

/// Sketch with the Eq.-1 layout over the shipped corpus vocabulary.
sketch::Sketch planned_sketch(const meter::RhymeScheme& scheme) {
  auto corpus =
      text::Corpus::load_path(testutil::repo_root() / "data" / "corpus");
  return sketch::plan_reference("the four seasons", testutil::cmu(), corpus,
                                testutil::stopwords(), scheme);
}

const lm::ReverseNGramModel& corpus_model() {
  static const auto model = [] {
    auto corpus =
        text::Corpus::load_path(testutil::repo_root() / "data" / "corpus");
    std::string body;
    for (const auto& line : corpus.all_lines()) {
      body += line;
      body += '\n';
    }
    return lm::ReverseNGramModel::train_text(body);
  }();
  return model;
}

}  // namespace

TEST_CASE("renormalize: singleton candidate takes all the mass") {
  auto d = make_dist(8, {{4, 0.3}});
  auto r = rhyme::renormalize(d, {4});
  CHECK(r.prob(4) == doctest::Approx(1.0));
  CHECK(r.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("renormalize preserves candidate ratios and zeroes the rest") {
  auto d = make_dist(8, {{3, 0.2}, {4, 0.3}, {5, 0.4}});
  auto r = rhyme::renormalize(d, {3, 4});
  CHECK(r.prob(3) == doctest::Approx(0.4));
  CHECK(r.prob(4) == doctest::Approx(0.6));
  CHECK(r.prob(5) == 0.0);
  CHECK(r.prob(0) == 0.0);
  CHECK(r.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("renormalize twice is idempotent on the candidate support") {
  auto d = make_dist(16, {{3, 0.1}, {7, 0.2}, {9, 0.05}});
  std::vector<WordId> cands = {3, 7, 9};
  auto once = rhyme::renormalize(d, cands);
  auto twice = rhyme::renormalize(once, cands);
  for (WordId id : cands)
    CHECK(twice.prob(id) == doctest::Approx(once.prob(id)).epsilon(1e-12));
}

TEST_CASE("renormalize with zero candidate mass raises SamplingError") {
  auto d = make_dist(8, {{3, 0.5}});
  CHECK_THROWS_AS(rhyme::renormalize(d, {4, 5}), SamplingError);
  CHECK_THROWS_AS(rhyme::renormalize(d, {}), ValidationError);
}

TEST_CASE("assign_rhymes fills every slot with rhyming pairs (shakespearean)") {
  auto scheme = meter::RhymeScheme::shakespearean();
  auto sk = planned_sketch(scheme);
  RandomSource rng(7);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng);

  sketch::validate_layout(result.sketch, scheme, false);
  const auto& letters = scheme.letters();
  for (size_t i = 0; i < letters.size(); ++i) {
    for (size_t j = i + 1; j < letters.size(); ++j) {
      if (letters[i] != letters[j]) continue;
      auto kind = phonetics::classify_rhyme(result.sketch.lines[i].rhyme_word,
                                            result.sketch.lines[j].rhyme_word,
                                            testutil::cmu());
      CHECK(kind != phonetics::RhymeKind::None);
    }
  }
  // Initial lines moved their keyword out of the content slots.
  for (int idx : meter::initial_rhyme_lines(scheme)) {
    const auto& line = result.sketch.lines[static_cast<size_t>(idx - 1)];
    CHECK(line.content_words.size() == 2);
    CHECK_FALSE(line.rhyme_word.empty());
  }
}

TEST_CASE("assign_rhymes keeps k>2 letters mutually rhyming (petrarchan)") {
  auto scheme = meter::RhymeScheme::petrarchan();
  auto sk = planned_sketch(scheme);
  RandomSource rng(3);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng);

  // Letter A occupies lines 1, 4, 5, 8: all six pairs must rhyme and the
  // words must be mutually distinct.
  std::vector<std::string> a_words = {result.sketch.lines[0].rhyme_word,
                                      result.sketch.lines[3].rhyme_word,
                                      result.sketch.lines[4].rhyme_word,
                                      result.sketch.lines[7].rhyme_word};
  std::set<std::string> distinct(a_words.begin(), a_words.end());
  CHECK(distinct.size() == 4);
  for (size_t i = 0; i < a_words.size(); ++i) {
    for (size_t j = i + 1; j < a_words.size(); ++j) {
      CHECK(phonetics::classify_rhyme(a_words[i], a_words[j], testutil::cmu()) !=
            phonetics::RhymeKind::None);
    }
  }
}

TEST_CASE("assigned rhyme words always allow a line ending") {
  auto scheme = meter::RhymeScheme::shakespearean();
  auto sk = planned_sketch(scheme);
  RandomSource rng(11);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng);
  for (const auto& line : result.sketch.lines)
    CHECK(meter::viable_line_ending(line.rhyme_word, testutil::cmu()));
}

TEST_CASE("fallback promotes an earlier keyword when the last is unusable") {
  auto scheme = meter::RhymeScheme::shakespearean();
  auto sk = planned_sketch(scheme);
  // Make line 1's third keyword hopeless: "happily" cannot end a line.
  sk.lines[0].content_words = {"winter", "storm", "happily"};
  RandomSource rng(5);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng);
  const auto& line = result.sketch.lines[0];
  CHECK(line.rhyme_word != "happily");
  CHECK(line.rhyme_provenance == "fallback");
  // The unusable keyword stays among the content words.
  CHECK(std::find(line.content_words.begin(), line.content_words.end(),
                  "happily") != line.content_words.end());
}

TEST_CASE("a planned third keyword seeds its letter's candidates") {
  auto scheme = meter::RhymeScheme::shakespearean();
  auto sk = planned_sketch(scheme);
  sk.lines[0].content_words = {"autumn", "wind", "leaves"};
  RandomSource rng(2);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng,
                                     &testutil::stopwords());
  CHECK(result.sketch.lines[0].rhyme_word == "leaves");
  CHECK(result.sketch.lines[0].rhyme_provenance == "initial");
  CHECK(result.sketch.lines[0].content_words ==
        std::vector<std::string>{"autumn", "wind"});
  // Line 3 (the other A line) drew from leaves's candidate pool.
  const auto& partner = result.sketch.lines[2].rhyme_word;
  auto cands = testutil::cmu_index().candidates("leaves");
  CHECK(std::find(cands.begin(), cands.end(), partner) != cands.end());
  CHECK(phonetics::classify_rhyme("leaves", partner, testutil::cmu()) !=
        phonetics::RhymeKind::None);
}

TEST_CASE("rhyme provenance is recorded per line") {
  auto scheme = meter::RhymeScheme::shakespearean();
  auto sk = planned_sketch(scheme);
  RandomSource rng(7);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng);
  for (const auto& line : result.sketch.lines) {
    CHECK((line.rhyme_provenance == "initial" ||
           line.rhyme_provenance == "sampled" ||
           line.rhyme_provenance == "fallback"));
  }
  // Candidate pools were recorded per letter.
  CHECK(result.assignment.candidates_used.size() == 7);
}

TEST_CASE("no-plan sketches get LM-seeded initial rhyme words") {
  auto scheme = meter::RhymeScheme::shakespearean();
  sketch::Sketch sk;
  sk.title = "anything";
  RandomSource rng(13);
  auto result = rhyme::assign_rhymes(sk, scheme, testutil::cmu(),
                                     testutil::cmu_index(), corpus_model(),
                                     lm::SamplerParams{}, rng);
  for (const auto& line : result.sketch.lines) {
    CHECK_FALSE(line.rhyme_word.empty());
    CHECK(meter::viable_line_ending(line.rhyme_word, testutil::cmu()));
  }
}
