#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "translit/alphabet.hpp"

namespace translit {

enum class UnmappedPolicy { passthrough_warn, reject };

// The grapheme correspondence table. `forward` takes one target-script
// grapheme to its source-script spelling (empty when the target mark has no
// source counterpart, as with gemination and nunation marks). `baseline`
// takes one source grapheme to its most common target image and is the
// context-free transliterator of the pipeline.
//
// Space, the mask symbol H, and punctuation are identity in both directions
// unless the table overrides them.
struct MappingTable {
  std::map<char32_t, std::u32string> forward;
  std::map<char32_t, std::u32string> baseline;

  // File format: sections "[forward]" and "[baseline]", one rule per line,
  // "<grapheme><TAB><replacement>" with an empty replacement meaning delete.
  // '#' starts a comment.
  static MappingTable load(const std::filesystem::path& file);

  // Consistency findings, one message per source grapheme g whose round trip
  // forward(baseline(g)) is non-empty and does not start with g. Shipped
  // tables may carry deliberate many-to-one collisions (letter variants);
  // these come back as findings for the caller to warn about.
  std::vector<std::string> validate() const;

  size_t max_forward_length() const;
};

// Per-grapheme application of `forward` to normalized target text. This is
// the pseudo-transliteration that manufactures synthetic parallel data: the
// output is a plausible source rendering, and (text, output) form a
// synthetic word-pair stream. Unmapped graphemes are an error naming the
// grapheme and its 1-based position.
std::u32string generate_pseudo_source(std::u32string_view target_text,
                                      const MappingTable& table);

// Context-free transliteration: per-grapheme concatenation of `baseline`
// entries. Never produces marks absent from the table (gemination, hamza,
// nunation are simply missed). `warnings`, when given, counts passthroughs
// of unmapped graphemes under UnmappedPolicy::passthrough_warn.
std::u32string baseline_transliterate(std::u32string_view source_text,
                                      const MappingTable& table,
                                      UnmappedPolicy policy = UnmappedPolicy::passthrough_warn,
                                      int* warnings = nullptr);

}  // namespace translit
