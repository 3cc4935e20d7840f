#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "translit/corpus.hpp"

namespace translit {

struct ExampleScore {
  std::u32string input;
  std::u32string prediction;
  std::u32string truth;
  int distance = 0;
  double normalized = 0.0;  // distance / |truth|
  std::string ops;          // error positions, e.g. "S@2 D@5"
};

struct EvalReport {
  double ler = 0.0;  // mean of normalized distances; can exceed 1
  size_t evaluated = 0;
  size_t excluded_empty_truth = 0;
  std::vector<ExampleScore> per_example;
  std::optional<double> topk_hit_rate;
  std::optional<double> word_ler;  // per-word view, when word counts align
  size_t word_count = 0;
  size_t word_mismatch_sequences = 0;  // sequences whose word counts differ
};

// Label error rate: mean over examples of ED(prediction, truth)/|truth|.
// Empty truths are excluded and counted. The mean is taken over the sorted
// ratios, so it depends only on the multiset of examples, never their order.
EvalReport label_error_rate(const std::vector<std::u32string>& predictions,
                            const std::vector<std::u32string>& truths,
                            const std::vector<std::u32string>* inputs = nullptr);

// Adds the per-word view to a report whose examples are multi-word
// sequences: predictions are split on spaces and scored word-by-word against
// the truth words wherever the counts agree.
void add_word_level(EvalReport& report);

// Jointly permutes the word pairs of a corpus: source and target move
// together, so the word-pair multiset is exactly preserved while sentence
// context is destroyed. Sentence lengths are kept.
ParallelCorpus shuffle_words(const ParallelCorpus& corpus, uint64_t seed);

// Fraction of examples whose truth appears verbatim in the example's k-best
// list.
double topk_analysis(const std::vector<std::vector<std::u32string>>& beams,
                     const std::vector<std::u32string>& truths);

// Tab-separated detail lines followed by a summary block.
void write_report(const std::filesystem::path& path, const EvalReport& report);

}  // namespace translit
