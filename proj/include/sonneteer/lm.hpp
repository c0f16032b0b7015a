// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sonneteer/common.hpp"

namespace sonneteer::lm {

using WordId = int32_t;

/// Dense, stable word index. Ids 0..2 are reserved for the special markers;
/// specials are never produced by sampling.
class Vocabulary {
 public:
  static constexpr WordId kUnk = 0;        // context-only unknown marker
  static constexpr WordId kLineStart = 1;  // leftmost position marker
  static constexpr WordId kLineEnd = 2;    // rightmost position marker
  static constexpr WordId kFirstWord = 3;

  Vocabulary();

  WordId intern(std::string_view word);
  /// kUnk when the word is not in the vocabulary.
  WordId get(std::string_view word) const;
  const std::string& word(WordId id) const { return words_.at(static_cast<size_t>(id)); }
  size_t size() const { return words_.size(); }
  bool is_special(WordId id) const { return id < kFirstWord; }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

/// A proper probability distribution over the vocabulary, dense by word id.
/// Backoff smoothing guarantees the probabilities sum to 1 (within 1e-9).
struct NextWordDistribution {
  std::vector<double> probs;

  double prob(WordId id) const { return probs[static_cast<size_t>(id)]; }
  double sum() const;
};

struct SamplerParams {
  int top_k = 50;
  double temperature = 0.85;
  int no_repeat_ngram_size = 3;
  uint64_t seed = 0;
};

/// Poem-level context a plug-in model may condition on. The reference n-gram
/// model ignores it; it exists so neural decoders receive the previously
/// generated lines verbatim.
struct PoemContext {
  const std::vector<std::vector<std::string>>* previous_lines = nullptr;
};

/// Contract shared by rhyme selection and decoding: a next-word distribution
/// over the vocabulary given a reverse-order context (rightmost word first).
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual const Vocabulary& vocab() const = 0;
  virtual NextWordDistribution next_distribution(
      std::span<const WordId> reverse_context,
      const PoemContext* poem = nullptr) const = 0;
};

/// Word-level n-gram model over right-to-left streams, smoothed with
/// interpolated absolute discounting (Kneser-Ney continuation counts at the
/// unigram level). Each training sentence w1..wm becomes the stream
/// [</s>, wm, ..., w1, <s>], so the model predicts leftward.
class ReverseNGramModel final : public LanguageModel {
 public:
  /// Trains from tokenized sentences. Throws TrainingError when no nonempty
  /// sentence exists.
  static ReverseNGramModel train(
      const std::vector<std::vector<std::string>>& sentences, int order = 3,
      double discount = 0.75);

  /// Trains from raw text (tokenized and sentence-split internally).
  static ReverseNGramModel train_text(std::string_view body, int order = 3,
                                      double discount = 0.75);

  const Vocabulary& vocab() const override { return vocab_; }
  int order() const { return order_; }
  double discount() const { return discount_; }

  NextWordDistribution next_distribution(
      std::span<const WordId> reverse_context,
      const PoemContext* poem = nullptr) const override;

  /// JSON-lines dump: a header line (order, discount, vocab size), the
  /// vocabulary, then one sorted line per context. Reload is bit-exact:
  /// save(load(save(m))) == save(m).
  void save(std::ostream& out) const;
  void save_file(const std::filesystem::path& path) const;
  static ReverseNGramModel load(std::istream& in);
  static ReverseNGramModel load_file(const std::filesystem::path& path);

  bool operator==(const ReverseNGramModel& o) const;

 private:
  ReverseNGramModel() = default;
  void rebuild_unigram();

  struct ContextCounts {
    int64_t total = 0;
    std::unordered_map<WordId, int32_t> counts;
  };
  struct VecHash {
    size_t operator()(const std::vector<WordId>& v) const;
  };
  using Level = std::unordered_map<std::vector<WordId>, ContextCounts, VecHash>;

  int order_ = 3;
  double discount_ = 0.75;
  Vocabulary vocab_;
  std::vector<Level> levels_;     // index l = contexts of length l+1
  std::vector<double> unigram_;   // continuation-count unigram distribution
};

/// Restricts to the k highest-probability words that are neither special nor
/// forbidden, sharpens with temperature (p^(1/T), renormalized), then samples.
/// Throws SamplingError when no candidate has positive probability.
WordId topk_sample(const NextWordDistribution& dist, const Vocabulary& vocab,
                   const SamplerParams& params,
                   const std::unordered_set<WordId>& forbidden,
                   RandomSource& rng);

/// True iff appending `candidate` to `generated` creates an n-gram of length
/// `size` already present in `generated`.
bool violates_no_repeat(std::span<const WordId> generated, WordId candidate,
                        int size);

}  // namespace sonneteer::lm
