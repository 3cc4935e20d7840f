#include "translit/alphabet.hpp"

#include <algorithm>
#include <set>

#include "translit/error.hpp"
#include "translit/hash.hpp"
#include "translit/utf8.hpp"

namespace translit {

bool is_punctuation(char32_t cp) {
  // ASCII punctuation minus the apostrophe, which decorates letters in the
  // source script and must stay letter-class.
  static const std::u32string ascii = U"!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~";
  if (ascii.find(cp) != std::u32string::npos) return true;
  switch (cp) {
    case U'،':  // Arabic comma
    case U'؛':  // Arabic semicolon
    case U'؟':  // Arabic question mark
    case U'٭':  // Arabic five pointed star
    case U'־':  // Hebrew maqaf
    case U'׃':  // Hebrew sof pasuq
    case U'–':
    case U'—':
    case U'“':
    case U'”':
    case U'‘':
    case U'’':
      return true;
    default:
      return false;
  }
}

Alphabet Alphabet::make(const std::vector<char32_t>& graphemes) {
  Alphabet a;
  a.symbols_ = {U"<b>", U" ", U"H", U"<e>"};
  a.index_[U' '] = kSpaceId;
  a.index_[kMaskChar] = kMaskId;
  for (char32_t cp : graphemes) {
    if (cp == U' ' || cp == kMaskChar) {
      throw Error("alphabet grapheme '" + utf8_encode(cp) + "' collides with a reserved symbol");
    }
    if (a.index_.count(cp)) continue;
    a.index_[cp] = static_cast<SymbolId>(a.symbols_.size());
    a.symbols_.push_back(std::u32string(1, cp));
  }
  a.punct_.assign(a.symbols_.size(), false);
  for (size_t i = kNumReserved; i < a.symbols_.size(); ++i) {
    a.punct_[i] = is_punctuation(a.symbols_[i][0]);
  }
  return a;
}

Alphabet Alphabet::from_texts(std::span<const std::u32string> texts) {
  std::set<char32_t> seen;
  for (const auto& t : texts) {
    for (char32_t cp : t) {
      if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') continue;
      if (cp == kMaskChar) continue;
      seen.insert(cp);
    }
  }
  return make(std::vector<char32_t>(seen.begin(), seen.end()));
}

const std::u32string& Alphabet::symbol(SymbolId id) const {
  if (id < 0 || id >= size()) throw Error("symbol id out of range: " + std::to_string(id));
  return symbols_[static_cast<size_t>(id)];
}

bool Alphabet::space_like(SymbolId id) const {
  if (id == kSpaceId || id == kMaskId || id == kEpsilonId) return true;
  if (id >= 0 && id < size()) return punct_[static_cast<size_t>(id)];
  return false;
}

std::optional<SymbolId> Alphabet::find(char32_t cp) const {
  auto it = index_.find(cp);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<SymbolId> Alphabet::encode(std::u32string_view text) const {
  std::vector<SymbolId> out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    auto id = find(text[i]);
    if (!id) {
      throw Error("grapheme '" + utf8_encode(text[i]) + "' at position " +
                  std::to_string(i + 1) + " is not in the alphabet");
    }
    out.push_back(*id);
  }
  return out;
}

std::u32string Alphabet::decode(std::span<const SymbolId> ids) const {
  std::u32string out;
  for (SymbolId id : ids) out += symbol(id);
  return out;
}

uint64_t Alphabet::fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : symbols_) {
    std::string bytes = utf8_encode(s);
    bytes.push_back('\x1f');  // separator, so ["ab"] and ["a","b"] differ
    h = fnv1a64(bytes.data(), bytes.size(), h);
  }
  return h;
}

}  // namespace translit
