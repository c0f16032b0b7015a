// Apache License, Version 2.0, refer to LICENSE.txt
//
// Benchmarks the OpenMP kernels against their serial reference
// implementations: rhyme-candidate retrieval over the full dictionary and
// batch format scoring. Outputs agree or the benchmark aborts.

#include <chrono>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sonneteer/eval.hpp"
#include "sonneteer/meter.hpp"
#include "sonneteer/phonetics.hpp"

using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

int main(int argc, char** argv) {
  std::string lexicon_path = "data/cmudict-0.7a.txt";
  std::string stopwords_path = "data/stopwords.txt";
  if (argc > 1) lexicon_path = argv[1];
  if (argc > 2) stopwords_path = argv[2];

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (compiled without OpenMP)\n";
#endif

  auto lex = sonneteer::phonetics::PronunciationLexicon::parse_file(lexicon_path);
  std::cout << "lexicon: " << lex.size() << " words\n\n";
  sonneteer::phonetics::RhymeIndex index(lex);

  const std::vector<std::string> queries = {
      "leaves", "fall",  "trees", "day",   "night", "moon",  "cold",
      "rain",   "light", "sea",   "winter", "storm", "friend", "gold"};

  // Kernel 1: rhyme-candidate retrieval.
  {
    auto t0 = Clock::now();
    size_t serial_total = 0;
    std::vector<std::vector<std::string>> serial_out;
    for (const auto& q : queries) {
      serial_out.push_back(index.candidates_serial(q));
      serial_total += serial_out.back().size();
    }
    double serial_ms = ms_since(t0);

    t0 = Clock::now();
    size_t parallel_total = 0;
    std::vector<std::vector<std::string>> parallel_out;
    for (const auto& q : queries) {
      parallel_out.push_back(index.candidates(q));
      parallel_total += parallel_out.back().size();
    }
    double parallel_ms = ms_since(t0);

    if (serial_out != parallel_out) {
      std::cerr << "MISMATCH: indexed kernel disagrees with serial reference\n";
      return 1;
    }
    std::cout << "rhyme_candidates over " << queries.size() << " queries ("
              << serial_total << " candidates)\n"
              << "  serial reference: " << serial_ms << " ms\n"
              << "  indexed+parallel: " << parallel_ms << " ms  (speedup "
              << serial_ms / parallel_ms << "x)\n\n";
  }

  // Kernel 2: batch format scoring.
  {
    std::vector<std::string> poem = {
        "the sun comes up to light the new spring day",
        "a cold wind blows through the dark of the night",
        "we walk the long path home the same old way",
        "and watch the last of the warm gold sun light",
        "the white waves break and roll on the wide sea",
        "the north wind bites and the air turns to cold",
        "the gulls cry loud and glide where they fly free",
        "the leaves turn red then brown then burn like gold",
        "the clouds roll in and bring the soft grey rain",
        "the night sky glows with the full white spring moon",
        "the streams run down and flood the low flat plain",
        "the frost will come and the snow will fall soon",
        "so take my hand and walk with me old friend",
        "we greet each year from its start to its end"};
    std::vector<std::vector<std::string>> poems(64, poem);
    std::vector<std::string> names;
    for (size_t i = 0; i < poems.size(); ++i)
      names.push_back("poem-" + std::to_string(i + 1));

    auto stop = sonneteer::text::Stopwords::load_file(stopwords_path);
    sonneteer::eval::ImageabilityLexicon img;
    img.add("sun", 0.9);
    img.add("moon", 0.9);
    img.add("rain", 0.8);
    img.add("leaves", 0.8);
    auto scheme = sonneteer::meter::RhymeScheme::shakespearean();

    auto t0 = Clock::now();
    auto serial = sonneteer::eval::batch_report(
        poems, names, scheme, lex, img, stop, sonneteer::eval::Execution::Serial);
    double serial_ms = ms_since(t0);

    t0 = Clock::now();
    auto parallel = sonneteer::eval::batch_report(
        poems, names, scheme, lex, img, stop,
        sonneteer::eval::Execution::Parallel);
    double parallel_ms = ms_since(t0);

    if (serial.rhyme_pct != parallel.rhyme_pct ||
        serial.meter_pct != parallel.meter_pct ||
        serial.distinct2 != parallel.distinct2) {
      std::cerr << "MISMATCH: parallel batch report disagrees with serial\n";
      return 1;
    }
    std::cout << "batch_report over " << poems.size() << " poems\n"
              << "  serial:   " << serial_ms << " ms\n"
              << "  parallel: " << parallel_ms << " ms  (speedup "
              << serial_ms / parallel_ms << "x)\n";
  }
  return 0;
}
