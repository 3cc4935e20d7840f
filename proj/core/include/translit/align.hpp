#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "translit/corpus.hpp"
#include "translit/mapping.hpp"

namespace translit {

struct AlignConfig {
  double keep_threshold = 0.5;
  const MappingTable* mapping = nullptr;
};

struct AlignStep {
  enum class Kind : uint8_t { match, skip_source, skip_target };
  Kind kind;
  int32_t source_index = -1;
  int32_t target_index = -1;

  bool operator==(const AlignStep&) const = default;
};

struct AlignmentTrace {
  std::vector<AlignStep> steps;
  long total_cost = 0;
  // Peak number of DP score cells held at once (two rows along the shorter
  // side). The choice-tag matrix for traceback is counted separately.
  size_t score_slots = 0;
};

// Distance between a source word and a target word. Both are brought into
// the source script first: the target through the table's forward map, the
// source by the identity.
int cross_script_distance(std::u32string_view source_word, std::u32string_view target_word,
                          const MappingTable& table);

// Word-level alignment minimizing total edit distance, where matching two
// words costs their cross-script distance and skipping a word costs its
// length (its mapped length on the target side). Iterative DP; ties prefer
// match, then skip_source, then skip_target, so traces are deterministic.
AlignmentTrace align(const std::vector<std::u32string>& source_words,
                     const std::vector<std::u32string>& target_words,
                     const AlignConfig& cfg);

// Turns a trace into word pairs. Matched pairs within the similarity
// threshold are kept; pairs above it, skipped words, and anything touching a
// masked word become the mask pair (H, H) at their position, so sentence
// structure survives.
std::vector<WordPair> extract_pairs(const AlignmentTrace& trace,
                                    const std::vector<std::u32string>& source_words,
                                    const std::vector<std::u32string>& target_words,
                                    const AlignConfig& cfg, const Alphabet& source_alphabet,
                                    const Alphabet& target_alphabet);

struct AlignSentenceStats {
  long cost = 0;
  size_t kept = 0;
  size_t masked = 0;
};

struct AlignOutcome {
  ParallelCorpus corpus;
  std::vector<AlignSentenceStats> stats;
};

// Sentence-by-sentence alignment of two token streams (sentence = input
// line). Streams with differing line counts are aligned as one long
// sentence each.
AlignOutcome align_corpus(const std::vector<std::vector<std::u32string>>& source_sentences,
                          const std::vector<std::vector<std::u32string>>& target_sentences,
                          const AlignConfig& cfg, const Alphabet& source_alphabet,
                          const Alphabet& target_alphabet);

}  // namespace translit
