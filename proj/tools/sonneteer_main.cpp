// Apache License, Version 2.0, refer to LICENSE.txt
//
// Command-line surface for the sonnet pipeline. Stages are file-composable:
// plan/rhyme/polish pass the sketch JSON along, generate runs them end to end.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "sonneteer/pipeline.hpp"

namespace sp = sonneteer::pipeline;

namespace {

void add_config_options(CLI::App* cmd, sp::RunConfig& cfg,
                        std::string& config_path) {
  cmd->add_option("--config", config_path, "key = value config file");
  cmd->add_option("--lexicon", cfg.lexicon_path, "CMU-format dictionary");
  cmd->add_option("--corpus", cfg.corpus_path, "prose corpus file or directory");
  cmd->add_option("--model", cfg.model_path, "n-gram model file");
  cmd->add_option("--stopwords", cfg.stopwords_path, "stopword list");
  cmd->add_option("--imagery", cfg.imagery_path, "imagery TSV");
  cmd->add_option("--similes", cfg.similes_path, "simile TSV");
  cmd->add_option("--pos", cfg.pos_path, "part-of-speech TSV");
  cmd->add_option("--imageability", cfg.imageability_path, "imageability TSV");
  cmd->add_option("--scheme", cfg.scheme,
                  "rhyme scheme: shakespearean, petrarchan, or 14 letters");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--order", cfg.order, "n-gram order");
  cmd->add_option("--top-k", cfg.decode.sampler.top_k, "sampler top-k");
  cmd->add_option("--temperature", cfg.decode.sampler.temperature,
                  "sampler temperature");
  cmd->add_option("--no-repeat", cfg.decode.sampler.no_repeat_ngram_size,
                  "no-repeat n-gram size");
  cmd->add_option("--samples", cfg.decode.samples_per_step,
                  "samples per decoding step");
  cmd->add_option("--beam-width", cfg.decode.beam_width, "beam width");
  cmd->add_option("--retry-budget", cfg.decode.retry_budget,
                  "restarts before relaxation");
  cmd->add_option("--out-prefix", cfg.out_prefix, "output file prefix");
  cmd->add_option("--planner-cmd", cfg.planner_command,
                  "external planner command (prompt on stdin)");
}

/// Re-parse so the config file provides defaults and explicit flags win.
sp::RunConfig effective_config(CLI::App* cmd, const sp::RunConfig& flags,
                               const std::string& config_path) {
  if (config_path.empty()) return flags;
  sp::RunConfig cfg = sp::load_config_file(config_path);
  sp::RunConfig merged = cfg;
  auto take = [&](const std::string& opt, auto member) {
    if (cmd->count(opt) > 0) merged.*member = flags.*member;
  };
  take("--lexicon", &sp::RunConfig::lexicon_path);
  take("--corpus", &sp::RunConfig::corpus_path);
  take("--model", &sp::RunConfig::model_path);
  take("--stopwords", &sp::RunConfig::stopwords_path);
  take("--imagery", &sp::RunConfig::imagery_path);
  take("--similes", &sp::RunConfig::similes_path);
  take("--pos", &sp::RunConfig::pos_path);
  take("--imageability", &sp::RunConfig::imageability_path);
  take("--scheme", &sp::RunConfig::scheme);
  take("--seed", &sp::RunConfig::seed);
  take("--order", &sp::RunConfig::order);
  take("--out-prefix", &sp::RunConfig::out_prefix);
  take("--planner-cmd", &sp::RunConfig::planner_command);
  if (cmd->count("--top-k")) merged.decode.sampler.top_k = flags.decode.sampler.top_k;
  if (cmd->count("--temperature"))
    merged.decode.sampler.temperature = flags.decode.sampler.temperature;
  if (cmd->count("--no-repeat"))
    merged.decode.sampler.no_repeat_ngram_size =
        flags.decode.sampler.no_repeat_ngram_size;
  if (cmd->count("--samples"))
    merged.decode.samples_per_step = flags.decode.samples_per_step;
  if (cmd->count("--beam-width")) merged.decode.beam_width = flags.decode.beam_width;
  if (cmd->count("--retry-budget"))
    merged.decode.retry_budget = flags.decode.retry_budget;
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sonneteer: constraint-checked sonnet generation"};
  app.require_subcommand(1);

  sp::RunConfig cfg;
  std::string config_path;
  std::string title;
  std::string sketch_path;
  std::vector<std::string> poem_paths;
  bool skip_polish = false;
  bool no_plan = false;

  auto* train = app.add_subcommand("train-lm", "train the reverse n-gram model");
  add_config_options(train, cfg, config_path);

  auto* plan = app.add_subcommand("plan", "plan keywords for a title");
  add_config_options(plan, cfg, config_path);
  plan->add_option("--title", title, "sonnet title")->required();
  plan->add_flag("--no-plan", no_plan, "emit an empty plan (ablation)");

  auto* rhyme = app.add_subcommand("rhyme", "fill rhyme slots of a sketch");
  add_config_options(rhyme, cfg, config_path);
  rhyme->add_option("--sketch", sketch_path, "sketch JSON file")->required();

  auto* polish = app.add_subcommand("polish", "add imagery and similes");
  add_config_options(polish, cfg, config_path);
  polish->add_option("--sketch", sketch_path, "sketch JSON file")->required();

  auto* generate = app.add_subcommand("generate", "run the full pipeline");
  add_config_options(generate, cfg, config_path);
  generate->add_option("--title", title, "sonnet title")->required();
  generate->add_flag("--skip-polish", skip_polish,
                     "skip imagery and similes (ablation)");
  generate->add_flag("--no-plan", no_plan, "skip keyword planning (ablation)");

  auto* check = app.add_subcommand("check", "format-check a poem file");
  add_config_options(check, cfg, config_path);
  check->add_option("poem", poem_paths, "poem file")->required();

  auto* score = app.add_subcommand("score", "novelty + format scores for poems");
  add_config_options(score, cfg, config_path);
  score->add_option("poems", poem_paths, "poem files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      auto c = effective_config(train, cfg, config_path);
      auto stats = sp::cmd_train_lm(c);
      std::cout << "kept " << stats.docs_kept << "/" << stats.docs_total
                << " documents (" << stats.docs_dropped << " filtered), "
                << stats.sentences << " sentences, vocabulary "
                << stats.vocab_size << "\n"
                << "model written to " << c.model_path << "\n";
    } else if (plan->parsed()) {
      auto c = effective_config(plan, cfg, config_path);
      c.no_plan = no_plan;
      sp::cmd_plan(c, title);
      std::cout << "sketch written to " << c.out_prefix << ".sketch.json\n";
    } else if (rhyme->parsed()) {
      auto c = effective_config(rhyme, cfg, config_path);
      sp::cmd_rhyme(c, sketch_path);
      std::cout << "rhyme words assigned in " << sketch_path << "\n";
    } else if (polish->parsed()) {
      auto c = effective_config(polish, cfg, config_path);
      sp::cmd_polish(c, sketch_path);
      std::cout << "sketch polished in " << sketch_path << "\n";
    } else if (generate->parsed()) {
      auto c = effective_config(generate, cfg, config_path);
      c.skip_polish = skip_polish;
      c.no_plan = no_plan;
      auto out = sp::cmd_generate(c, title);
      std::cout << sonneteer::decoder::to_text(out.sonnet,
                                               sonneteer::meter::RhymeScheme::parse(c.scheme))
                << "\n"
                << sp::render_format_report(out.self_check) << "files: "
                << out.text_path.string() << ", " << out.json_path.string()
                << ", " << out.sketch_path.string() << ", "
                << out.report_path.string() << "\n";
    } else if (check->parsed()) {
      auto c = effective_config(check, cfg, config_path);
      auto report = sp::cmd_check(c, poem_paths.at(0));
      std::cout << sp::render_format_report(report);
    } else if (score->parsed()) {
      auto c = effective_config(score, cfg, config_path);
      std::vector<std::filesystem::path> paths(poem_paths.begin(),
                                               poem_paths.end());
      auto report = sp::cmd_score(c, paths);
      std::cout << sonneteer::eval::render_table(report);
      for (const auto& row : report.rows) {
        if (!row.error.empty()) return 3;
      }
    }
  } catch (const sonneteer::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
