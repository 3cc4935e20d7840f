// Small constructed scripts shared by the pipeline and acceptance tests.
// The source script is lowercase Latin, the target uppercase; the mapping is
// invertible unless a test adds an ambiguity on purpose.
#pragma once

#include <string>
#include <vector>

#include "translit/align.hpp"
#include "translit/corpus.hpp"
#include "translit/mapping.hpp"

namespace toy {

inline translit::MappingTable latin_table(std::u32string_view lowers) {
  translit::MappingTable t;
  for (char32_t c : lowers) {
    char32_t upper = c - 32;
    t.forward[upper] = std::u32string(1, c);
    t.baseline[c] = std::u32string(1, upper);
  }
  return t;
}

inline translit::Alphabet lower_alphabet(std::u32string_view lowers) {
  return translit::Alphabet::make({lowers.begin(), lowers.end()});
}

inline translit::Alphabet upper_alphabet(std::u32string_view lowers) {
  std::vector<char32_t> uppers;
  for (char32_t c : lowers) uppers.push_back(c - 32);
  return translit::Alphabet::make(uppers);
}

// Builds a corpus from (source sentence, target sentence) strings with
// space-separated words of equal counts.
inline translit::ParallelCorpus corpus_from_sentences(
    const std::vector<std::pair<std::u32string, std::u32string>>& sentences,
    const translit::Alphabet& src_ab, const translit::Alphabet& tgt_ab,
    translit::Origin origin = translit::Origin::real) {
  translit::ParallelCorpus corpus;
  corpus.source_alphabet = src_ab;
  corpus.target_alphabet = tgt_ab;
  corpus.origin = origin;
  for (const auto& [src, tgt] : sentences) {
    auto sw = translit::split_words(src);
    auto tw = translit::split_words(tgt);
    std::vector<translit::WordPair> sentence;
    for (size_t i = 0; i < sw.size(); ++i) {
      translit::WordPair p;
      p.source = translit::Token::from_text(sw[i], src_ab);
      p.target = translit::Token::from_text(tw[i], tgt_ab);
      sentence.push_back(std::move(p));
    }
    corpus.append_sentence(std::move(sentence));
  }
  return corpus;
}

}  // namespace toy
