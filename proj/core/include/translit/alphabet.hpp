#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <span>

namespace translit {

using SymbolId = int32_t;

bool is_punctuation(char32_t cp);

// Closed symbol inventory of one script. Index 0 is always the CTC blank;
// the word separator, the mask symbol H (stands in for non-transliterable
// words) and a reserved filler symbol occupy the next three slots. Regular
// graphemes follow, one code point each, in the order given to make().
//
// Immutable after construction; safe to share across threads.
class Alphabet {
 public:
  static constexpr SymbolId kBlankId = 0;
  static constexpr SymbolId kSpaceId = 1;
  static constexpr SymbolId kMaskId = 2;
  static constexpr SymbolId kEpsilonId = 3;
  static constexpr int kNumReserved = 4;

  static constexpr char32_t kMaskChar = U'H';

  Alphabet() = default;

  // Builds an alphabet from regular graphemes (duplicates collapse, reserved
  // code points are rejected). Pass sorted input when a canonical order is
  // needed for checkpoint fingerprints.
  static Alphabet make(const std::vector<char32_t>& graphemes);

  // Collects every grapheme of `texts` (minus whitespace) and builds the
  // alphabet over the sorted union.
  static Alphabet from_texts(std::span<const std::u32string> texts);

  int size() const { return static_cast<int>(symbols_.size()); }
  SymbolId blank_id() const { return kBlankId; }
  SymbolId space_id() const { return kSpaceId; }
  SymbolId mask_id() const { return kMaskId; }
  SymbolId epsilon_id() const { return kEpsilonId; }

  const std::u32string& symbol(SymbolId id) const;
  bool is_reserved(SymbolId id) const { return id >= 0 && id < kNumReserved; }

  // Symbols exempt from input dropout: separator, mask, filler, punctuation.
  bool space_like(SymbolId id) const;

  std::optional<SymbolId> find(char32_t cp) const;

  // Throws Error naming the 1-based position of the first unknown grapheme.
  std::vector<SymbolId> encode(std::u32string_view text) const;
  std::u32string decode(std::span<const SymbolId> ids) const;

  // Stable content hash over the symbol list; stored in checkpoints so a
  // model is never run against a different inventory.
  uint64_t fingerprint() const;

 private:
  std::vector<std::u32string> symbols_;
  std::vector<bool> punct_;
  std::unordered_map<char32_t, SymbolId> index_;
};

}  // namespace translit
