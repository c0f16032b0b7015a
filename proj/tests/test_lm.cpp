// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "sonneteer/lm.hpp"
#include "sonneteer/text.hpp"
#include "test_util.hpp"

using namespace sonneteer;
using lm::ReverseNGramModel;
using lm::Vocabulary;
using lm::WordId;

namespace {

ReverseNGramModel tiny_ab() {
  return ReverseNGramModel::train({{"a", "b"}}, 3, 0.75);
}

lm::NextWordDistribution dist_for(const ReverseNGramModel& m,
                                  const std::vector<std::string>& ctx) {
  std::vector<WordId> ids;
  for (const auto& w : ctx) ids.push_back(m.vocab().get(w));
  return m.next_distribution(ids);
}

std::string corpus_text() {
  auto corpus = text::Corpus::load_path(testutil::repo_root() / "data" /
                                        "corpus");
  std::string body;
  for (const auto& line : corpus.all_lines()) {
    body += line;
    body += '\n';
  }
  return body;
}

}  // namespace

TEST_CASE("training reverses sentences with boundary markers") {
  // Stream for "a b" is [</s>, b, a, <s>]; predicting from context "b" puts
  // the non-discount mass on "a". Hand computation with d = 0.75:
  //   p(a | b) = (1 - 0.75)/1 + 0.75 * (1/3) = 0.5
  //   p(b | b) = p(<s> | b) = 0.25
  auto m = tiny_ab();
  auto d = dist_for(m, {"b"});
  WordId a = m.vocab().get("a");
  WordId b = m.vocab().get("b");
  CHECK(d.prob(a) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.prob(b) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d.prob(Vocabulary::kLineStart) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-9));

  WordId best = 0;
  for (WordId id = 0; id < static_cast<WordId>(d.probs.size()); ++id)
    if (d.prob(id) > d.prob(best)) best = id;
  CHECK(best == a);
}

TEST_CASE("order-1 model degenerates to the continuation unigram") {
  auto m = ReverseNGramModel::train({{"a", "b"}, {"b", "c"}}, 1, 0.75);
  auto empty_ctx = dist_for(m, {});
  auto with_ctx = dist_for(m, {"b"});
  REQUIRE(empty_ctx.probs.size() == with_ctx.probs.size());
  for (size_t i = 0; i < empty_ctx.probs.size(); ++i)
    CHECK(empty_ctx.probs[i] == with_ctx.probs[i]);
  CHECK(empty_ctx.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty corpus raises a training error") {
  CHECK_THROWS_AS(ReverseNGramModel::train({}, 3, 0.75), TrainingError);
  CHECK_THROWS_AS(ReverseNGramModel::train({{}, {}}, 3, 0.75), TrainingError);
}

TEST_CASE("next_distribution sums to one over random contexts") {
  auto m = ReverseNGramModel::train_text(corpus_text());
  RandomSource rng(11);
  const auto& words = m.vocab().words();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<WordId> ctx;
    size_t len = rng.uniform(4);
    for (size_t i = 0; i < len; ++i)
      ctx.push_back(static_cast<WordId>(rng.uniform(words.size())));
    auto d = m.next_distribution(ctx);
    CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("unseen contexts back off and are never zero everywhere") {
  auto m = tiny_ab();
  auto d = dist_for(m, {"zzz", "qqq"});  // both map to <unk>
  double total = 0.0;
  for (double p : d.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.prob(m.vocab().get("a")) > 0.0);
}

TEST_CASE("identical context yields identical distributions") {
  auto m = ReverseNGramModel::train_text(corpus_text());
  auto d1 = dist_for(m, {"the", "winter"});
  auto d2 = dist_for(m, {"the", "winter"});
  CHECK(d1.probs == d2.probs);
}

TEST_CASE("topk_sample: k=1 is argmax modulo forbidden") {
  auto m = tiny_ab();
  auto d = dist_for(m, {"b"});
  lm::SamplerParams params;
  params.top_k = 1;
  RandomSource rng(5);
  WordId a = m.vocab().get("a");
  WordId b = m.vocab().get("b");
  CHECK(lm::topk_sample(d, m.vocab(), params, {}, rng) == a);
  CHECK(lm::topk_sample(d, m.vocab(), params, {a}, rng) == b);
}

TEST_CASE("topk_sample: tiny temperature approximates argmax") {
  auto m = testutil::toy_model();
  auto d = dist_for(m, {"bright"});  // "is" dominates this context uniquely
  lm::SamplerParams params;
  params.top_k = 50;
  params.temperature = 0.01;
  RandomSource rng(9);
  WordId best = Vocabulary::kFirstWord;
  int max_count = 0;
  for (WordId id = Vocabulary::kFirstWord;
       id < static_cast<WordId>(d.probs.size()); ++id) {
    if (d.prob(id) > d.prob(best)) best = id;
  }
  for (WordId id = Vocabulary::kFirstWord;
       id < static_cast<WordId>(d.probs.size()); ++id) {
    if (d.prob(id) == d.prob(best)) ++max_count;
  }
  REQUIRE(max_count == 1);  // the argmax must be unique for this check
  CHECK(m.vocab().word(best) == "is");
  for (int i = 0; i < 50; ++i)
    CHECK(lm::topk_sample(d, m.vocab(), params, {}, rng) == best);
}

TEST_CASE("topk_sample: seeded runs reproduce exactly") {
  auto m = ReverseNGramModel::train_text(corpus_text());
  auto d = dist_for(m, {"the"});
  lm::SamplerParams params;
  std::vector<WordId> run1, run2;
  {
    RandomSource rng(42);
    for (int i = 0; i < 32; ++i)
      run1.push_back(lm::topk_sample(d, m.vocab(), params, {}, rng));
  }
  {
    RandomSource rng(42);
    for (int i = 0; i < 32; ++i)
      run2.push_back(lm::topk_sample(d, m.vocab(), params, {}, rng));
  }
  CHECK(run1 == run2);
}

TEST_CASE("topk_sample never emits specials and can exhaust") {
  auto m = tiny_ab();
  auto d = dist_for(m, {"b"});
  lm::SamplerParams params;
  RandomSource rng(3);
  std::unordered_set<WordId> forbidden;
  for (int i = 0; i < 64; ++i) {
    WordId id = lm::topk_sample(d, m.vocab(), params, forbidden, rng);
    CHECK_FALSE(m.vocab().is_special(id));
  }
  forbidden = {m.vocab().get("a"), m.vocab().get("b")};
  CHECK_THROWS_AS(lm::topk_sample(d, m.vocab(), params, forbidden, rng),
                  SamplingError);
}

TEST_CASE("violates_no_repeat detects recreated trigrams") {
  auto m = tiny_ab();
  WordId a = m.vocab().get("a");
  WordId b = m.vocab().get("b");
  std::vector<WordId> gen = {a, b, a, b};
  std::vector<WordId> empty;
  std::vector<WordId> one = {a};
  CHECK(lm::violates_no_repeat(gen, a, 3));       // aba occurs already
  CHECK_FALSE(lm::violates_no_repeat(gen, b, 3)); // abb is new
  CHECK_FALSE(lm::violates_no_repeat(empty, a, 3));
  CHECK_FALSE(lm::violates_no_repeat(one, a, 3)); // size exceeds length + 1
}

TEST_CASE("model file round-trips bit-exactly") {
  auto m = ReverseNGramModel::train_text(corpus_text());
  std::ostringstream first;
  m.save(first);
  std::istringstream in(first.str());
  auto loaded = ReverseNGramModel::load(in);
  std::ostringstream second;
  loaded.save(second);
  CHECK(first.str() == second.str());
  CHECK(m == loaded);

  auto d1 = dist_for(m, {"the", "cold"});
  auto d2 = dist_for(loaded, {"the", "cold"});
  CHECK(d1.probs == d2.probs);
}

TEST_CASE("greedy decoding reconstructs a single-sentence corpus") {
  std::vector<std::string> sentence = {"the", "leaves", "fall", "from",
                                       "the", "trees"};
  auto m = ReverseNGramModel::train({sentence}, 3, 0.75);
  std::vector<WordId> ctx = {Vocabulary::kLineEnd};
  std::vector<std::string> reversed;
  for (int guard = 0; guard < 20; ++guard) {
    auto d = m.next_distribution(ctx);
    WordId best = 0;
    for (WordId id = 0; id < static_cast<WordId>(d.probs.size()); ++id)
      if (d.prob(id) > d.prob(best)) best = id;
    if (best == Vocabulary::kLineStart) break;
    reversed.push_back(m.vocab().word(best));
    ctx.push_back(best);
  }
  std::vector<std::string> forward(reversed.rbegin(), reversed.rend());
  CHECK(forward == sentence);
}
