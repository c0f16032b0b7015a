// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sonneteer/decoder.hpp"
#include "sonneteer/eval.hpp"
#include "sonneteer/lm.hpp"
#include "sonneteer/meter.hpp"
#include "sonneteer/phonetics.hpp"
#include "sonneteer/polish.hpp"
#include "sonneteer/rhyme.hpp"
#include "sonneteer/sketch.hpp"
#include "sonneteer/text.hpp"

namespace sonneteer::pipeline {

/// Everything a run needs: resource paths, scheme, sampler/decoder knobs,
/// seed, ablation flags. Loadable from a key = value file; CLI flags override.
struct RunConfig {
  std::string lexicon_path;
  std::string corpus_path;
  std::string model_path;
  std::string stopwords_path;
  std::string imagery_path;
  std::string similes_path;
  std::string pos_path;
  std::string imageability_path;

  std::string scheme = "shakespearean";
  int order = 3;
  double discount = 0.75;
  decoder::DecodeParams decode;  // includes SamplerParams
  uint64_t seed = 0;
  bool skip_polish = false;  // ablation: no imagery, no similes
  bool no_plan = false;      // ablation: no planned keywords
  int imagery_max_repl = 2;
  int simile_max_add = 1;

  std::string out_prefix = "sonnet";
  std::string planner_command;  // external planner subprocess, optional
};

RunConfig load_config_file(const std::filesystem::path& path);
/// FNV-1a hash of the canonical config rendering; embedded in every artifact.
std::string config_hash(const RunConfig& cfg);

struct TrainStats {
  size_t docs_total = 0;
  size_t docs_kept = 0;
  size_t docs_dropped = 0;
  size_t sentences = 0;
  size_t vocab_size = 0;
};

/// Trains the reverse n-gram model on the corpus, keeping documents of 8..50
/// lines, and writes it to cfg.model_path.
TrainStats cmd_train_lm(const RunConfig& cfg);

/// Planning stage: writes <out_prefix>.sketch.json and returns the sketch.
sketch::Sketch cmd_plan(const RunConfig& cfg, const std::string& title);

/// Rhyme stage over an existing sketch file (in place).
sketch::Sketch cmd_rhyme(const RunConfig& cfg,
                         const std::filesystem::path& sketch_path);

/// Polish stage over an existing sketch file (in place).
sketch::Sketch cmd_polish(const RunConfig& cfg,
                          const std::filesystem::path& sketch_path);

struct GenerateOutput {
  sketch::Sketch sketch;
  decoder::Sonnet sonnet;
  eval::FormatReport self_check;
  std::filesystem::path sketch_path;
  std::filesystem::path text_path;
  std::filesystem::path json_path;
  std::filesystem::path report_path;
};

/// Full pipeline: plan, assign rhymes, polish, decode; writes sketch JSON,
/// sonnet text, sonnet JSON and a self-check format report.
GenerateOutput cmd_generate(const RunConfig& cfg, const std::string& title);

/// Reads a poem file (nonblank, non-'#' lines; must be 14) and format-checks.
eval::FormatReport cmd_check(const RunConfig& cfg,
                             const std::filesystem::path& poem_path);

/// Batch novelty/format scoring over several poem files.
eval::BatchReport cmd_score(const RunConfig& cfg,
                            const std::vector<std::filesystem::path>& poems);

/// Poem file reader shared by check/score: skips blanks and '#' comments.
std::vector<std::string> read_poem_file(const std::filesystem::path& path);

std::string format_report_json(const eval::FormatReport& report);
std::string render_format_report(const eval::FormatReport& report);

}  // namespace sonneteer::pipeline
