#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <unordered_map>

#include "translit/corpus.hpp"

namespace translit {

enum class NormAction { keep, erase, reorder_after_alif };

// Per-grapheme normalization actions. `erase` drops the short vowel marks,
// `reorder_after_alif` moves a nunation mark written before an alif to after
// it (the modern placement). Graphemes without an entry pass through, unless
// `known` is set, in which case anything outside both sets is rejected.
struct NormalizationPolicy {
  std::unordered_map<char32_t, NormAction> actions;
  char32_t alif = U'ا';
  std::optional<std::set<char32_t>> known;

  // One rule per line: "<grapheme><TAB><keep|delete|reorder-after-alif>".
  // '#' starts a comment; a "@alif <grapheme>" directive overrides the
  // reorder anchor.
  static NormalizationPolicy load(const std::filesystem::path& file);
};

// Applies the policy to a raw string: drops `erase` graphemes, performs the
// alif reorder, collapses whitespace runs to single spaces. Throws Error with
// the 1-based position of the first grapheme that is neither known nor
// covered by the policy.
std::u32string normalize_text(std::u32string_view text, const NormalizationPolicy& policy);

// Full target-side normalization: normalize, split into words, encode.
std::vector<Token> normalize_target_text(std::u32string_view text,
                                         const NormalizationPolicy& policy,
                                         const Alphabet& alphabet);

// Replaces the tokens at `positions` with the mask token H. Positions out of
// range are an error; sequence length is preserved.
std::vector<Token> mask_insertions(std::vector<Token> tokens,
                                   const std::set<size_t>& positions);

}  // namespace translit
