#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "translit/alphabet.hpp"

namespace translit {

// One word. A masked token is the placeholder H standing in for a word the
// model must not transliterate; it always consists of exactly one mask id.
struct Token {
  std::vector<SymbolId> graphemes;
  bool is_masked = false;

  size_t length() const { return graphemes.size(); }
  bool operator==(const Token&) const = default;

  static Token masked();
  static Token from_text(std::u32string_view word, const Alphabet& alphabet);
  std::u32string text(const Alphabet& alphabet) const;
};

enum class Origin { real, synthetic };

struct WordPair {
  Token source;
  Token target;
  double similarity = 0.0;  // normalized edit distance in [0,1]
};

// Aligned source/target word sequences, sentence structure kept through
// `sentence_offsets` (start index of each sentence in `pairs`).
struct ParallelCorpus {
  std::vector<WordPair> pairs;
  std::vector<size_t> sentence_offsets;
  Alphabet source_alphabet;
  Alphabet target_alphabet;
  Origin origin = Origin::real;

  size_t sentence_count() const { return sentence_offsets.size(); }
  // [begin, end) into pairs for sentence s.
  std::pair<size_t, size_t> sentence_range(size_t s) const;
  void append_sentence(std::vector<WordPair> sentence);
};

// Sentence-per-line word pair text. A line of the two-column form is
// "source tokens<TAB>target tokens"; the token H marks a masked word on
// either side. Token counts must match within a line.
ParallelCorpus read_pair_file(const std::filesystem::path& tsv,
                              const Alphabet& source_alphabet,
                              const Alphabet& target_alphabet, Origin origin);
ParallelCorpus read_pair_files(const std::filesystem::path& source_file,
                               const std::filesystem::path& target_file,
                               const Alphabet& source_alphabet,
                               const Alphabet& target_alphabet, Origin origin);
void write_pair_file(const std::filesystem::path& tsv, const ParallelCorpus& corpus);

// Plain one-sentence-per-line text, whitespace tokenized.
std::vector<std::vector<std::u32string>> read_sentences(const std::filesystem::path& file);
void write_sentences(const std::filesystem::path& file,
                     const std::vector<std::vector<std::u32string>>& sentences);

std::vector<std::u32string> split_words(std::u32string_view line);

}  // namespace translit
