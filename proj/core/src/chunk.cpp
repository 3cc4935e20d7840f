#include "translit/chunk.hpp"

#include "translit/error.hpp"

namespace translit {

std::vector<std::pair<size_t, size_t>> chunk_ranges(const std::vector<Token>& words,
                                                    int window) {
  if (window < 1) throw Error("chunk window must be >= 1");
  std::vector<std::pair<size_t, size_t>> ranges;
  size_t begin = 0;
  size_t chars = 0;
  for (size_t i = 0; i < words.size(); ++i) {
    if (chars > 0) ++chars;  // separator
    chars += words[i].length();
    if (chars >= static_cast<size_t>(window)) {
      ranges.emplace_back(begin, i + 1);
      begin = i + 1;
      chars = 0;
    }
  }
  if (begin < words.size()) ranges.emplace_back(begin, words.size());
  return ranges;
}

std::vector<std::u32string> chunk_sequences(const std::vector<Token>& words, int window,
                                            const Alphabet& alphabet) {
  std::vector<std::u32string> chunks;
  for (auto [begin, end] : chunk_ranges(words, window)) {
    std::u32string chunk;
    for (size_t i = begin; i < end; ++i) {
      if (i > begin) chunk.push_back(U' ');
      chunk += words[i].text(alphabet);
    }
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

}  // namespace translit
