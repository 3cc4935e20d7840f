#include "translit/mapping.hpp"

#include <fstream>

#include "translit/error.hpp"
#include "translit/utf8.hpp"

namespace translit {

namespace {

bool identity_grapheme(char32_t cp) {
  return cp == U' ' || cp == Alphabet::kMaskChar || is_punctuation(cp);
}

}  // namespace

MappingTable MappingTable::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  MappingTable table;
  std::map<char32_t, std::u32string>* section = nullptr;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::u32string line = utf8_decode(raw);
    // Trailing spaces are noise, but a trailing tab is the separator of an
    // empty replacement and must survive.
    while (!line.empty() && line.back() == U' ') line.pop_back();
    if (line.empty()) continue;
    if (line == U"[forward]") {
      section = &table.forward;
      continue;
    }
    if (line == U"[baseline]") {
      section = &table.baseline;
      continue;
    }
    if (!section) {
      throw Error(file.string() + ":" + std::to_string(line_no) +
                  ": rule before any [forward]/[baseline] section");
    }
    auto tab = line.find(U'\t');
    if (tab != 1) {
      throw Error(file.string() + ":" + std::to_string(line_no) +
                  ": expected \"<grapheme><TAB><replacement-or-empty>\"");
    }
    std::u32string replacement = line.substr(tab + 1);
    while (!replacement.empty() &&
           (replacement.back() == U' ' || replacement.back() == U'\t')) {
      replacement.pop_back();
    }
    while (!replacement.empty() &&
           (replacement.front() == U' ' || replacement.front() == U'\t')) {
      replacement.erase(replacement.begin());
    }
    (*section)[line[0]] = replacement;
  }
  return table;
}

std::vector<std::string> MappingTable::validate() const {
  std::vector<std::string> findings;
  for (const auto& [g, image] : baseline) {
    std::u32string round;
    bool mapped = true;
    for (char32_t cp : image) {
      auto it = forward.find(cp);
      if (it == forward.end()) {
        if (identity_grapheme(cp)) {
          round.push_back(cp);
        } else {
          mapped = false;
          break;
        }
      } else {
        round += it->second;
      }
    }
    if (!mapped) continue;  // forward does not cover the image; nothing to say
    if (!round.empty() && round[0] != g) {
      findings.push_back("baseline " + utf8_encode(g) + " -> " + utf8_encode(image) +
                         " round-trips to " + utf8_encode(round) +
                         ", which does not start with " + utf8_encode(g));
    }
  }
  return findings;
}

size_t MappingTable::max_forward_length() const {
  size_t n = 0;
  for (const auto& [g, image] : forward) n = std::max(n, image.size());
  return n;
}

std::u32string generate_pseudo_source(std::u32string_view target_text,
                                      const MappingTable& table) {
  std::u32string out;
  out.reserve(target_text.size());
  for (size_t i = 0; i < target_text.size(); ++i) {
    char32_t cp = target_text[i];
    auto it = table.forward.find(cp);
    if (it != table.forward.end()) {
      out += it->second;
    } else if (identity_grapheme(cp)) {
      out.push_back(cp);
    } else {
      throw Error("no forward mapping for grapheme '" + utf8_encode(cp) + "' at position " +
                  std::to_string(i + 1));
    }
  }
  return out;
}

std::u32string baseline_transliterate(std::u32string_view source_text,
                                      const MappingTable& table, UnmappedPolicy policy,
                                      int* warnings) {
  std::u32string out;
  out.reserve(source_text.size());
  for (size_t i = 0; i < source_text.size(); ++i) {
    char32_t cp = source_text[i];
    auto it = table.baseline.find(cp);
    if (it != table.baseline.end()) {
      out += it->second;
    } else if (identity_grapheme(cp)) {
      out.push_back(cp);
    } else if (policy == UnmappedPolicy::passthrough_warn) {
      out.push_back(cp);
      if (warnings) ++*warnings;
    } else {
      throw Error("no baseline mapping for grapheme '" + utf8_encode(cp) +
                  "' at position " + std::to_string(i + 1));
    }
  }
  return out;
}

}  // namespace translit
