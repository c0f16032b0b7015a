// Apache License, Version 2.0, refer to LICENSE.txt
#include "sonneteer/pipeline.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sonneteer::pipeline {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Canonical rendering of the knobs that shape outputs, hashed into artifact
/// provenance.
std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "scheme=" << cfg.scheme << ";order=" << cfg.order
      << ";discount=" << cfg.discount << ";top_k=" << cfg.decode.sampler.top_k
      << ";temperature=" << cfg.decode.sampler.temperature
      << ";no_repeat=" << cfg.decode.sampler.no_repeat_ngram_size
      << ";samples=" << cfg.decode.samples_per_step
      << ";beam_width=" << cfg.decode.beam_width
      << ";retry_budget=" << cfg.decode.retry_budget
      << ";skip_polish=" << cfg.skip_polish << ";no_plan=" << cfg.no_plan
      << ";imagery_max=" << cfg.imagery_max_repl
      << ";simile_max=" << cfg.simile_max_add;
  return out.str();
}

struct Resources {
  phonetics::PronunciationLexicon lexicon;
  text::Stopwords stopwords;
};

Resources load_resources(const RunConfig& cfg) {
  Resources r;
  if (cfg.lexicon_path.empty())
    throw ValidationError("config: lexicon path is required");
  r.lexicon = phonetics::PronunciationLexicon::parse_file(cfg.lexicon_path);
  if (!cfg.stopwords_path.empty())
    r.stopwords = text::Stopwords::load_file(cfg.stopwords_path);
  return r;
}

json provenance_json(const RunConfig& cfg) {
  json p;
  p["seed"] = cfg.seed;
  p["config_hash"] = config_hash(cfg);
  p["scheme"] = cfg.scheme;
  p["params"] = {{"top_k", cfg.decode.sampler.top_k},
                 {"temperature", cfg.decode.sampler.temperature},
                 {"no_repeat_ngram_size", cfg.decode.sampler.no_repeat_ngram_size},
                 {"samples_per_step", cfg.decode.samples_per_step},
                 {"beam_width", cfg.decode.beam_width},
                 {"retry_budget", cfg.decode.retry_budget}};
  p["skip_polish"] = cfg.skip_polish;
  p["no_plan"] = cfg.no_plan;
  return p;
}

sketch::Sketch empty_plan(const std::string& title) {
  sketch::Sketch sk;
  sk.title = title;
  return sk;
}

/// Artifacts embed the config hash and seed that produced them.
void write_sketch_artifact(const sketch::Sketch& sk, const RunConfig& cfg,
                           const std::filesystem::path& path) {
  json j = json::parse(sketch::to_json(sk));
  j["provenance"] = provenance_json(cfg);
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write sketch: " + path.string());
  out << j.dump(2) << "\n";
}

/// Runs an external planner command: the masked prompt goes to its stdin, the
/// keyword output is read from its stdout.
class SubprocessPlanner final : public sketch::KeywordPlanner {
 public:
  explicit SubprocessPlanner(std::string command)
      : command_(std::move(command)) {}

  std::array<std::vector<std::string>, sketch::kLineCount> plan(
      std::string_view title,
      const std::array<int, sketch::kLineCount>& counts) override {
    namespace fs = std::filesystem;
    fs::path in_path =
        fs::temp_directory_path() / ("sonneteer-prompt-" +
                                     std::to_string(::getpid()) + ".txt");
    {
      std::ofstream out(in_path);
      out << sketch::serialize_masked_prompt(title, counts);
    }
    std::string cmd = command_ + " < " + in_path.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw PlannerError("cannot run planner command: " + command_);
    std::string output;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    int rc = pclose(pipe);
    fs::remove(in_path);
    if (rc != 0)
      throw PlannerError("planner command failed with status " +
                         std::to_string(rc));
    return sketch::parse_keyword_output(output, counts);
  }

 private:
  std::string command_;
};

}  // namespace

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config: " + path.string());
  RunConfig cfg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "lexicon") cfg.lexicon_path = value;
      else if (key == "corpus") cfg.corpus_path = value;
      else if (key == "model") cfg.model_path = value;
      else if (key == "stopwords") cfg.stopwords_path = value;
      else if (key == "imagery") cfg.imagery_path = value;
      else if (key == "similes") cfg.similes_path = value;
      else if (key == "pos") cfg.pos_path = value;
      else if (key == "imageability") cfg.imageability_path = value;
      else if (key == "scheme") cfg.scheme = value;
      else if (key == "order") cfg.order = std::stoi(value);
      else if (key == "discount") cfg.discount = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "top_k") cfg.decode.sampler.top_k = std::stoi(value);
      else if (key == "temperature")
        cfg.decode.sampler.temperature = std::stod(value);
      else if (key == "no_repeat_ngram_size")
        cfg.decode.sampler.no_repeat_ngram_size = std::stoi(value);
      else if (key == "samples_per_step")
        cfg.decode.samples_per_step = std::stoi(value);
      else if (key == "beam_width") cfg.decode.beam_width = std::stoi(value);
      else if (key == "retry_budget")
        cfg.decode.retry_budget = std::stoi(value);
      else if (key == "skip_polish") cfg.skip_polish = value == "true";
      else if (key == "no_plan") cfg.no_plan = value == "true";
      else if (key == "imagery_max_repl")
        cfg.imagery_max_repl = std::stoi(value);
      else if (key == "simile_max_add") cfg.simile_max_add = std::stoi(value);
      else if (key == "out_prefix") cfg.out_prefix = value;
      else if (key == "planner_command") cfg.planner_command = value;
      else
        throw ParseError("config line " + std::to_string(line_no) +
                         ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

std::string config_hash(const RunConfig& cfg) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

TrainStats cmd_train_lm(const RunConfig& cfg) {
  if (cfg.corpus_path.empty())
    throw ValidationError("config: corpus path is required");
  if (cfg.model_path.empty())
    throw ValidationError("config: model path is required");

  text::Corpus corpus = text::Corpus::load_path(cfg.corpus_path);
  TrainStats stats;
  stats.docs_total = corpus.docs.size();
  stats.docs_dropped = corpus.filter_by_length(8, 50);
  stats.docs_kept = corpus.docs.size();
  if (corpus.docs.empty())
    throw TrainingError("no document between 8 and 50 lines survives the filter");

  std::vector<std::vector<std::string>> sentences;
  for (const auto& doc : corpus.docs) {
    for (const auto& line : doc.lines) {
      for (auto& s : text::split_sentences(line))
        sentences.push_back(std::move(s));
    }
  }
  stats.sentences = sentences.size();
  auto model = lm::ReverseNGramModel::train(sentences, cfg.order, cfg.discount);
  stats.vocab_size = model.vocab().size();
  model.save_file(cfg.model_path);
  return stats;
}

sketch::Sketch cmd_plan(const RunConfig& cfg, const std::string& title) {
  Resources res = load_resources(cfg);
  meter::RhymeScheme scheme = meter::RhymeScheme::parse(cfg.scheme);

  sketch::Sketch sk;
  if (cfg.no_plan) {
    sk = empty_plan(title);
  } else if (!cfg.planner_command.empty()) {
    SubprocessPlanner planner(cfg.planner_command);
    sk = sketch::plan_with(planner, title, scheme);
    for (const auto& line : sk.lines) {
      for (const auto& w : line.content_words) {
        if (!res.lexicon.contains(w))
          throw PlannerError("planner keyword not in lexicon: " + w);
      }
    }
  } else {
    if (cfg.corpus_path.empty())
      throw ValidationError("config: corpus path is required for planning");
    text::Corpus corpus = text::Corpus::load_path(cfg.corpus_path);
    sk = sketch::plan_reference(title, res.lexicon, corpus, res.stopwords,
                                scheme);
  }
  write_sketch_artifact(sk, cfg, cfg.out_prefix + ".sketch.json");
  return sk;
}

sketch::Sketch cmd_rhyme(const RunConfig& cfg,
                         const std::filesystem::path& sketch_path) {
  Resources res = load_resources(cfg);
  meter::RhymeScheme scheme = meter::RhymeScheme::parse(cfg.scheme);
  auto model = lm::ReverseNGramModel::load_file(cfg.model_path);
  phonetics::RhymeIndex index(res.lexicon);
  RandomSource rng(cfg.seed);

  sketch::Sketch sk = sketch::load_json(sketch_path);
  auto result = rhyme::assign_rhymes(sk, scheme, res.lexicon, index, model,
                                     cfg.decode.sampler, rng, &res.stopwords);
  write_sketch_artifact(result.sketch, cfg, sketch_path);
  return result.sketch;
}

sketch::Sketch cmd_polish(const RunConfig& cfg,
                          const std::filesystem::path& sketch_path) {
  Resources res = load_resources(cfg);
  RandomSource rng(cfg.seed);
  sketch::Sketch sk = sketch::load_json(sketch_path);

  polish::ImageryTable imagery;
  if (!cfg.imagery_path.empty())
    imagery = polish::ImageryTable::load_file(cfg.imagery_path);
  polish::SimileTable similes;
  if (!cfg.similes_path.empty())
    similes = polish::SimileTable::load_file(cfg.similes_path);
  polish::PosLexicon pos;
  if (!cfg.pos_path.empty()) pos = polish::PosLexicon::load_file(cfg.pos_path);

  sk = polish::apply_imagery(sk, imagery, pos, res.lexicon,
                             cfg.imagery_max_repl, rng);
  sk = polish::apply_similes(sk, similes, pos, res.lexicon, cfg.simile_max_add,
                             rng);
  write_sketch_artifact(sk, cfg, sketch_path);
  return sk;
}

namespace {

json sonnet_json(const decoder::Sonnet& sonnet, const RunConfig& cfg) {
  json j;
  j["version"] = 1;
  j["title"] = sonnet.title;
  j["scheme"] = sonnet.scheme;
  json lines = json::array();
  for (const auto& line : sonnet.lines) {
    json jl;
    jl["words"] = line.words;
    jl["template"] = std::string(meter::to_string(line.matched));
    jl["relaxed"] = line.relaxed;
    if (!line.dropped_words.empty()) jl["dropped_words"] = line.dropped_words;
    lines.push_back(std::move(jl));
  }
  j["lines"] = lines;
  j["provenance"] = provenance_json(cfg);
  return j;
}

}  // namespace

std::string format_report_json(const eval::FormatReport& report) {
  json j;
  j["rhyme_pct"] = report.rhyme_pct;
  j["meter_pct"] = report.meter_pct;
  j["syllable_pct"] = report.syllable_pct;
  j["rhyme_ok"] = report.rhyme_ok;
  j["rhyme_total"] = report.rhyme_total;
  j["meter_ok"] = report.meter_ok;
  j["syllable_ok"] = report.syllable_ok;
  j["line_count"] = report.line_count;
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back(json{{"lines", {p.line_a, p.line_b}},
                         {"letter", std::string(1, p.letter)},
                         {"words", {p.word_a, p.word_b}},
                         {"ok", p.ok},
                         {"kind", p.kind}});
  }
  j["pairs"] = pairs;
  json lines = json::array();
  for (const auto& l : report.lines) {
    json jl{{"line", l.line},
            {"meter_ok", l.meter_ok},
            {"syllable_ok", l.syllable_ok}};
    if (!l.matched_template.empty()) jl["template"] = l.matched_template;
    if (!l.unknown_words.empty()) jl["unknown_words"] = l.unknown_words;
    lines.push_back(std::move(jl));
  }
  j["lines"] = lines;
  return j.dump(2) + "\n";
}

std::string render_format_report(const eval::FormatReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "rhyme    " << report.rhyme_pct << "% (" << report.rhyme_ok << "/"
      << report.rhyme_total << " pairs)\n";
  out << "meter    " << report.meter_pct << "% (" << report.meter_ok
      << "/14 lines)\n";
  out << "syllable " << report.syllable_pct << "% (" << report.syllable_ok
      << "/14 lines)\n";
  for (const auto& p : report.pairs) {
    if (!p.ok)
      out << "  pair " << p.line_a << "-" << p.line_b << " (" << p.letter
          << "): '" << p.word_a << "' / '" << p.word_b << "' " << p.kind
          << "\n";
  }
  for (const auto& l : report.lines) {
    if (!l.meter_ok || !l.syllable_ok) {
      out << "  line " << l.line << ":";
      if (!l.meter_ok) out << " no-template";
      if (!l.syllable_ok) out << " bad-syllables";
      for (const auto& w : l.unknown_words) out << " unknown:" << w;
      out << "\n";
    }
  }
  return out.str();
}

GenerateOutput cmd_generate(const RunConfig& cfg, const std::string& title) {
  Resources res = load_resources(cfg);
  meter::RhymeScheme scheme = meter::RhymeScheme::parse(cfg.scheme);
  if (cfg.model_path.empty())
    throw ValidationError("config: model path is required");
  auto model = lm::ReverseNGramModel::load_file(cfg.model_path);
  phonetics::RhymeIndex index(res.lexicon);
  RandomSource rng(cfg.seed);

  // Stage a: plan.
  sketch::Sketch sk;
  if (cfg.no_plan) {
    sk = empty_plan(title);
  } else if (!cfg.planner_command.empty()) {
    SubprocessPlanner planner(cfg.planner_command);
    sk = sketch::plan_with(planner, title, scheme);
  } else {
    if (cfg.corpus_path.empty())
      throw ValidationError("config: corpus path is required for planning");
    text::Corpus corpus = text::Corpus::load_path(cfg.corpus_path);
    sk = sketch::plan_reference(title, res.lexicon, corpus, res.stopwords,
                                scheme);
  }

  // Stage b: rhyme pairs.
  auto assigned = rhyme::assign_rhymes(sk, scheme, res.lexicon, index, model,
                                       cfg.decode.sampler, rng,
                                       &res.stopwords);
  sk = assigned.sketch;

  // Stage c: polish (skipped under the ablation flag).
  if (!cfg.skip_polish) {
    polish::ImageryTable imagery;
    if (!cfg.imagery_path.empty())
      imagery = polish::ImageryTable::load_file(cfg.imagery_path);
    polish::SimileTable similes;
    if (!cfg.similes_path.empty())
      similes = polish::SimileTable::load_file(cfg.similes_path);
    polish::PosLexicon pos;
    if (!cfg.pos_path.empty())
      pos = polish::PosLexicon::load_file(cfg.pos_path);
    sk = polish::apply_imagery(sk, imagery, pos, res.lexicon,
                               cfg.imagery_max_repl, rng);
    sk = polish::apply_similes(sk, similes, pos, res.lexicon,
                               cfg.simile_max_add, rng);
  }

  // Stage d: constrained decoding.
  decoder::Sonnet sonnet =
      decoder::generate_sonnet(sk, scheme, model, res.lexicon, cfg.decode, rng);
  sonnet.seed = cfg.seed;

  GenerateOutput out;
  out.sketch = sk;
  out.sonnet = sonnet;

  std::vector<std::string> lines;
  for (const auto& line : sonnet.lines) {
    std::string joined;
    for (size_t w = 0; w < line.words.size(); ++w) {
      if (w > 0) joined.push_back(' ');
      joined += line.words[w];
    }
    lines.push_back(std::move(joined));
  }
  out.self_check = meter::check_sonnet_format(lines, scheme, res.lexicon);

  out.sketch_path = cfg.out_prefix + ".sketch.json";
  out.text_path = cfg.out_prefix + ".txt";
  out.json_path = cfg.out_prefix + ".json";
  out.report_path = cfg.out_prefix + ".report.json";

  write_sketch_artifact(sk, cfg, out.sketch_path);
  {
    std::ofstream text_out(out.text_path);
    if (!text_out)
      throw LoadError("cannot write sonnet: " + out.text_path.string());
    text_out << decoder::to_text(sonnet, scheme);
    text_out << "# seed=" << cfg.seed << " config=" << config_hash(cfg) << "\n";
  }
  {
    std::ofstream json_out(out.json_path);
    json_out << sonnet_json(sonnet, cfg).dump(2) << "\n";
  }
  {
    json report = json::parse(format_report_json(out.self_check));
    report["provenance"] = provenance_json(cfg);
    std::ofstream report_out(out.report_path);
    report_out << report.dump(2) << "\n";
  }
  return out;
}

std::vector<std::string> read_poem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open poem: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

eval::FormatReport cmd_check(const RunConfig& cfg,
                             const std::filesystem::path& poem_path) {
  Resources res = load_resources(cfg);
  meter::RhymeScheme scheme = meter::RhymeScheme::parse(cfg.scheme);
  auto lines = read_poem_file(poem_path);
  return meter::check_sonnet_format(lines, scheme, res.lexicon);
}

eval::BatchReport cmd_score(const RunConfig& cfg,
                            const std::vector<std::filesystem::path>& poems) {
  Resources res = load_resources(cfg);
  meter::RhymeScheme scheme = meter::RhymeScheme::parse(cfg.scheme);
  if (cfg.imageability_path.empty())
    throw ValidationError("config: imageability path is required for scoring");
  auto img = eval::ImageabilityLexicon::load_file(cfg.imageability_path);

  std::vector<std::vector<std::string>> texts;
  std::vector<std::string> names;
  for (const auto& p : poems) {
    texts.push_back(read_poem_file(p));
    names.push_back(p.filename().string());
  }
  return eval::batch_report(texts, names, scheme, res.lexicon, img,
                            res.stopwords);
}

}  // namespace sonneteer::pipeline
