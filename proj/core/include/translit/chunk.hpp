#pragma once

#include <utility>

#include "translit/corpus.hpp"

namespace translit {

// Greedy split of a word sequence into training sequences: words are added
// (separators counted) until the running character count reaches `window`,
// then the chunk closes at the word boundary. Words are never split, so a
// long word forms its own chunk and the final chunk may be short.
std::vector<std::pair<size_t, size_t>> chunk_ranges(const std::vector<Token>& words,
                                                    int window);

// Same split, rendered as character strings (words joined by single spaces).
std::vector<std::u32string> chunk_sequences(const std::vector<Token>& words, int window,
                                            const Alphabet& alphabet);

}  // namespace translit
