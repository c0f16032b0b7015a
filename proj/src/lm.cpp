// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sonneteer/text.hpp"

namespace sonneteer::lm {

using json = nlohmann::ordered_json;

Vocabulary::Vocabulary() {
  intern("<unk>");
  intern("<s>");
  intern("</s>");
}

WordId Vocabulary::intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::get(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

double NextWordDistribution::sum() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

size_t ReverseNGramModel::VecHash::operator()(
    const std::vector<WordId>& v) const {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (WordId id : v) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= static_cast<uint64_t>((id >> shift) & 0xff);
      h *= 1099511628211ull;
    }
  }
  return static_cast<size_t>(h);
}

ReverseNGramModel ReverseNGramModel::train(
    const std::vector<std::vector<std::string>>& sentences, int order,
    double discount) {
  if (order < 1) throw TrainingError("n-gram order must be >= 1");
  if (discount <= 0.0 || discount >= 1.0)
    throw TrainingError("discount must lie in (0, 1)");

  ReverseNGramModel m;
  m.order_ = order;
  m.discount_ = discount;
  // Bigram counts are always collected: the continuation-count unigram needs
  // them even when order == 1.
  m.levels_.resize(static_cast<size_t>(std::max(order - 1, 1)));

  size_t trained = 0;
  for (const auto& sentence : sentences) {
    if (sentence.empty()) continue;
    ++trained;
    std::vector<WordId> stream;
    stream.reserve(sentence.size() + 2);
    stream.push_back(Vocabulary::kLineEnd);
    for (auto it = sentence.rbegin(); it != sentence.rend(); ++it)
      stream.push_back(m.vocab_.intern(*it));
    stream.push_back(Vocabulary::kLineStart);

    for (size_t t = 1; t < stream.size(); ++t) {
      WordId target = stream[t];
      for (size_t len = 1; len <= m.levels_.size() && len <= t; ++len) {
        std::vector<WordId> ctx(stream.begin() + (t - len),
                                stream.begin() + t);
        auto& cc = m.levels_[len - 1][std::move(ctx)];
        ++cc.total;
        ++cc.counts[target];
      }
    }
  }
  if (trained == 0)
    throw TrainingError("corpus is empty after tokenization");
  m.rebuild_unigram();
  return m;
}

ReverseNGramModel ReverseNGramModel::train_text(std::string_view body,
                                                int order, double discount) {
  return train(text::split_sentences(body), order, discount);
}

void ReverseNGramModel::rebuild_unigram() {
  // Kneser-Ney continuation counts: the number of distinct single-word
  // contexts each target follows, normalized over all bigram types.
  std::vector<int64_t> continuation(vocab_.size(), 0);
  int64_t types = 0;
  for (const auto& [ctx, cc] : levels_[0]) {
    for (const auto& [w, c] : cc.counts) {
      ++continuation[static_cast<size_t>(w)];
      ++types;
    }
  }
  unigram_.assign(vocab_.size(), 0.0);
  if (types == 0) return;
  for (size_t i = 0; i < unigram_.size(); ++i)
    unigram_[i] = static_cast<double>(continuation[i]) / static_cast<double>(types);
}

NextWordDistribution ReverseNGramModel::next_distribution(
    std::span<const WordId> reverse_context, const PoemContext*) const {
  NextWordDistribution dist;
  dist.probs = unigram_;

  size_t max_len = static_cast<size_t>(std::max(order_ - 1, 0));
  max_len = std::min(max_len, reverse_context.size());
  for (size_t len = 1; len <= max_len; ++len) {
    std::vector<WordId> ctx(reverse_context.end() - len,
                            reverse_context.end());
    auto it = levels_[len - 1].find(ctx);
    if (it == levels_[len - 1].end()) break;  // longest available suffix
    const auto& cc = it->second;
    const double total = static_cast<double>(cc.total);
    const double lambda =
        discount_ * static_cast<double>(cc.counts.size()) / total;
    for (double& p : dist.probs) p *= lambda;
    for (const auto& [w, c] : cc.counts)
      dist.probs[static_cast<size_t>(w)] +=
          (static_cast<double>(c) - discount_) / total;
  }
  return dist;
}

void ReverseNGramModel::save(std::ostream& out) const {
  json header;
  header["format"] = "sonneteer-ngram";
  header["version"] = 1;
  header["order"] = order_;
  header["discount"] = discount_;
  header["vocab_size"] = vocab_.size();
  out << header.dump() << '\n';
  out << json{{"vocab", vocab_.words()}}.dump() << '\n';

  for (size_t level = 0; level < levels_.size(); ++level) {
    std::vector<std::pair<std::vector<WordId>, const ContextCounts*>> items;
    items.reserve(levels_[level].size());
    for (const auto& [ctx, cc] : levels_[level]) items.emplace_back(ctx, &cc);
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [ctx, cc] : items) {
      std::vector<std::pair<WordId, int32_t>> counts(cc->counts.begin(),
                                                     cc->counts.end());
      std::sort(counts.begin(), counts.end());
      json line;
      line["ctx"] = ctx;
      json jc = json::array();
      for (const auto& [w, c] : counts) jc.push_back(json::array({w, c}));
      line["counts"] = jc;
      out << line.dump() << '\n';
    }
  }
}

void ReverseNGramModel::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write model file: " + path.string());
  save(out);
}

ReverseNGramModel ReverseNGramModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty model file");
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "sonneteer-ngram")
    throw LoadError("not a sonneteer-ngram model file");

  ReverseNGramModel m;
  m.order_ = header.at("order").get<int>();
  m.discount_ = header.at("discount").get<double>();
  m.levels_.resize(static_cast<size_t>(std::max(m.order_ - 1, 1)));

  if (!std::getline(in, line)) throw LoadError("model file missing vocabulary");
  json vocab_line = json::parse(line);
  size_t id = 0;
  for (const auto& w : vocab_line.at("vocab")) {
    std::string word = w.get<std::string>();
    if (id >= Vocabulary::kFirstWord) m.vocab_.intern(word);
    ++id;
  }
  if (m.vocab_.size() != header.at("vocab_size").get<size_t>())
    throw LoadError("model vocabulary size mismatch");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json entry = json::parse(line);
    std::vector<WordId> ctx = entry.at("ctx").get<std::vector<WordId>>();
    if (ctx.empty() || ctx.size() > m.levels_.size())
      throw LoadError("model context of unsupported length");
    auto& cc = m.levels_[ctx.size() - 1][std::move(ctx)];
    for (const auto& pair : entry.at("counts")) {
      WordId w = pair.at(0).get<WordId>();
      int32_t c = pair.at(1).get<int32_t>();
      cc.counts[w] = c;
      cc.total += c;
    }
  }
  m.rebuild_unigram();
  return m;
}

ReverseNGramModel ReverseNGramModel::load_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open model file: " + path.string());
  return load(in);
}

bool ReverseNGramModel::operator==(const ReverseNGramModel& o) const {
  std::ostringstream a, b;
  save(a);
  o.save(b);
  return a.str() == b.str();
}

WordId topk_sample(const NextWordDistribution& dist, const Vocabulary& vocab,
                   const SamplerParams& params,
                   const std::unordered_set<WordId>& forbidden,
                   RandomSource& rng) {
  if (params.top_k < 1) throw SamplingError("top_k must be >= 1");
  if (!(params.temperature > 0.0))
    throw SamplingError("temperature must be > 0");

  std::vector<std::pair<double, WordId>> pool;
  for (WordId id = 0; id < static_cast<WordId>(dist.probs.size()); ++id) {
    if (vocab.is_special(id)) continue;
    if (forbidden.count(id)) continue;
    double p = dist.probs[static_cast<size_t>(id)];
    if (p > 0.0) pool.emplace_back(p, id);
  }
  if (pool.empty())
    throw SamplingError("top-k sampling exhausted: no candidate has mass");

  size_t k = std::min(pool.size(), static_cast<size_t>(params.top_k));
  std::partial_sort(pool.begin(), pool.begin() + static_cast<long>(k),
                    pool.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  pool.resize(k);

  double total = 0.0;
  std::vector<double> weights(k);
  for (size_t i = 0; i < k; ++i) {
    weights[i] = std::pow(pool[i].first, 1.0 / params.temperature);
    total += weights[i];
  }
  double u = rng.next_double() * total;
  double acc = 0.0;
  for (size_t i = 0; i < k; ++i) {
    acc += weights[i];
    if (u < acc) return pool[i].second;
  }
  return pool.back().second;
}

bool violates_no_repeat(std::span<const WordId> generated, WordId candidate,
                        int size) {
  if (size < 1) throw ValidationError("no-repeat ngram size must be >= 1");
  size_t n = static_cast<size_t>(size);
  if (generated.size() + 1 < n) return false;

  std::vector<WordId> ngram(generated.end() - (n - 1), generated.end());
  ngram.push_back(candidate);
  if (generated.size() < n) return false;
  for (size_t i = 0; i + n <= generated.size(); ++i) {
    if (std::equal(ngram.begin(), ngram.end(), generated.begin() + i))
      return true;
  }
  return false;
}

}  // namespace sonneteer::lm
