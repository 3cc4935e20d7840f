#include "translit/normalize.hpp"

#include <fstream>

#include "translit/error.hpp"
#include "translit/utf8.hpp"

namespace translit {

NormalizationPolicy NormalizationPolicy::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  NormalizationPolicy policy;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::u32string line = utf8_decode(raw);
    while (!line.empty() && (line.back() == U' ' || line.back() == U'\t')) line.pop_back();
    if (line.empty()) continue;

    if (line[0] == U'@') {
      auto words = split_words(line);
      if (words.size() == 2 && words[0] == U"@alif" && words[1].size() == 1) {
        policy.alif = words[1][0];
        continue;
      }
      throw Error(file.string() + ":" + std::to_string(line_no) + ": bad directive");
    }

    auto tab = line.find(U'\t');
    if (tab != 1) {
      throw Error(file.string() + ":" + std::to_string(line_no) +
                  ": expected \"<grapheme><TAB><action>\"");
    }
    char32_t grapheme = line[0];
    std::u32string action = line.substr(tab + 1);
    while (!action.empty() && (action.front() == U' ' || action.front() == U'\t'))
      action.erase(action.begin());
    if (action == U"keep") {
      policy.actions[grapheme] = NormAction::keep;
    } else if (action == U"delete") {
      policy.actions[grapheme] = NormAction::erase;
    } else if (action == U"reorder-after-alif") {
      policy.actions[grapheme] = NormAction::reorder_after_alif;
    } else {
      throw Error(file.string() + ":" + std::to_string(line_no) + ": unknown action '" +
                  utf8_encode(action) + "'");
    }
  }
  return policy;
}

std::u32string normalize_text(std::u32string_view text, const NormalizationPolicy& policy) {
  std::u32string out;
  out.reserve(text.size());
  bool pending_space = false;
  // A nunation mark written before an alif belongs after it. Within each
  // maximal run of alifs and reorder marks, alifs are emitted first; this is
  // a stable partition, so a second pass is the identity.
  std::u32string run_alifs, run_marks;
  auto flush_run = [&] {
    out += run_alifs;
    out += run_marks;
    run_alifs.clear();
    run_marks.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char32_t cp = text[i];
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') {
      flush_run();
      if (!out.empty()) pending_space = true;
      continue;
    }
    NormAction action = NormAction::keep;
    auto it = policy.actions.find(cp);
    if (it != policy.actions.end()) {
      action = it->second;
    } else if (policy.known && !policy.known->count(cp)) {
      throw Error("grapheme '" + utf8_encode(cp) + "' at position " + std::to_string(i + 1) +
                  " is neither in the alphabet nor covered by the normalization policy");
    }
    if (action == NormAction::erase) continue;
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    if (cp == policy.alif) {
      run_alifs.push_back(cp);
    } else if (action == NormAction::reorder_after_alif) {
      run_marks.push_back(cp);
    } else {
      flush_run();
      out.push_back(cp);
    }
  }
  flush_run();
  return out;
}

std::vector<Token> normalize_target_text(std::u32string_view text,
                                         const NormalizationPolicy& policy,
                                         const Alphabet& alphabet) {
  std::u32string normalized = normalize_text(text, policy);
  std::vector<Token> tokens;
  for (const auto& word : split_words(normalized)) {
    tokens.push_back(Token::from_text(word, alphabet));
  }
  return tokens;
}

std::vector<Token> mask_insertions(std::vector<Token> tokens,
                                   const std::set<size_t>& positions) {
  for (size_t pos : positions) {
    if (pos >= tokens.size()) {
      throw Error("mask position " + std::to_string(pos) + " out of range (" +
                  std::to_string(tokens.size()) + " tokens)");
    }
    tokens[pos] = Token::masked();
  }
  return tokens;
}

}  // namespace translit
