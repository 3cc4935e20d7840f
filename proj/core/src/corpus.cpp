#include "translit/corpus.hpp"

#include <fstream>
#include <sstream>

#include "translit/error.hpp"
#include "translit/utf8.hpp"

namespace translit {

Token Token::masked() {
  Token t;
  t.graphemes = {Alphabet::kMaskId};
  t.is_masked = true;
  return t;
}

Token Token::from_text(std::u32string_view word, const Alphabet& alphabet) {
  if (word == std::u32string(1, Alphabet::kMaskChar)) return masked();
  Token t;
  t.graphemes = alphabet.encode(word);
  for (SymbolId id : t.graphemes) {
    if (id == Alphabet::kSpaceId || id == Alphabet::kMaskId) {
      throw Error("token '" + utf8_encode(word) + "' contains a reserved symbol");
    }
  }
  return t;
}

std::u32string Token::text(const Alphabet& alphabet) const {
  return alphabet.decode(graphemes);
}

std::pair<size_t, size_t> ParallelCorpus::sentence_range(size_t s) const {
  size_t begin = sentence_offsets.at(s);
  size_t end = s + 1 < sentence_offsets.size() ? sentence_offsets[s + 1] : pairs.size();
  return {begin, end};
}

void ParallelCorpus::append_sentence(std::vector<WordPair> sentence) {
  sentence_offsets.push_back(pairs.size());
  for (auto& p : sentence) pairs.push_back(std::move(p));
}

std::vector<std::u32string> split_words(std::u32string_view line) {
  std::vector<std::u32string> words;
  std::u32string cur;
  for (char32_t cp : line) {
    if (cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\n') {
      if (!cur.empty()) {
        words.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(cp);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<WordPair> make_sentence(const std::vector<std::u32string>& src,
                                    const std::vector<std::u32string>& tgt,
                                    const Alphabet& source_alphabet,
                                    const Alphabet& target_alphabet, size_t line_no) {
  if (src.size() != tgt.size()) {
    throw Error("pair file line " + std::to_string(line_no) + ": token counts differ (" +
                std::to_string(src.size()) + " vs " + std::to_string(tgt.size()) + ")");
  }
  std::vector<WordPair> sentence;
  sentence.reserve(src.size());
  for (size_t i = 0; i < src.size(); ++i) {
    WordPair p;
    p.source = Token::from_text(src[i], source_alphabet);
    p.target = Token::from_text(tgt[i], target_alphabet);
    if (p.source.is_masked != p.target.is_masked) {
      throw Error("pair file line " + std::to_string(line_no) + ", token " +
                  std::to_string(i + 1) + ": mask must appear on both sides");
    }
    sentence.push_back(std::move(p));
  }
  return sentence;
}

}  // namespace

ParallelCorpus read_pair_file(const std::filesystem::path& tsv,
                              const Alphabet& source_alphabet,
                              const Alphabet& target_alphabet, Origin origin) {
  ParallelCorpus corpus;
  corpus.source_alphabet = source_alphabet;
  corpus.target_alphabet = target_alphabet;
  corpus.origin = origin;
  auto lines = read_lines(tsv);
  for (size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto tab = lines[n].find('\t');
    if (tab == std::string::npos) {
      throw Error("pair file line " + std::to_string(n + 1) + ": missing tab separator");
    }
    auto src = split_words(utf8_decode(std::string_view(lines[n]).substr(0, tab)));
    auto tgt = split_words(utf8_decode(std::string_view(lines[n]).substr(tab + 1)));
    corpus.append_sentence(
        make_sentence(src, tgt, source_alphabet, target_alphabet, n + 1));
  }
  return corpus;
}

ParallelCorpus read_pair_files(const std::filesystem::path& source_file,
                               const std::filesystem::path& target_file,
                               const Alphabet& source_alphabet,
                               const Alphabet& target_alphabet, Origin origin) {
  auto src_lines = read_lines(source_file);
  auto tgt_lines = read_lines(target_file);
  if (src_lines.size() != tgt_lines.size()) {
    throw Error("pair files are not line-aligned: " + std::to_string(src_lines.size()) +
                " vs " + std::to_string(tgt_lines.size()) + " lines");
  }
  ParallelCorpus corpus;
  corpus.source_alphabet = source_alphabet;
  corpus.target_alphabet = target_alphabet;
  corpus.origin = origin;
  for (size_t n = 0; n < src_lines.size(); ++n) {
    auto src = split_words(utf8_decode(src_lines[n]));
    auto tgt = split_words(utf8_decode(tgt_lines[n]));
    if (src.empty() && tgt.empty()) continue;
    corpus.append_sentence(
        make_sentence(src, tgt, source_alphabet, target_alphabet, n + 1));
  }
  return corpus;
}

void write_pair_file(const std::filesystem::path& tsv, const ParallelCorpus& corpus) {
  std::ofstream out(tsv, std::ios::binary);
  if (!out) throw Error("cannot write " + tsv.string());
  for (size_t s = 0; s < corpus.sentence_count(); ++s) {
    auto [begin, end] = corpus.sentence_range(s);
    std::string src, tgt;
    for (size_t i = begin; i < end; ++i) {
      if (i > begin) {
        src += ' ';
        tgt += ' ';
      }
      src += utf8_encode(corpus.pairs[i].source.text(corpus.source_alphabet));
      tgt += utf8_encode(corpus.pairs[i].target.text(corpus.target_alphabet));
    }
    out << src << '\t' << tgt << '\n';
  }
}

std::vector<std::vector<std::u32string>> read_sentences(const std::filesystem::path& file) {
  std::vector<std::vector<std::u32string>> sentences;
  for (const auto& line : read_lines(file)) {
    sentences.push_back(split_words(utf8_decode(line)));
  }
  // Drop trailing blank lines but keep interior ones as empty sentences.
  while (!sentences.empty() && sentences.back().empty()) sentences.pop_back();
  return sentences;
}

void write_sentences(const std::filesystem::path& file,
                     const std::vector<std::vector<std::u32string>>& sentences) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  for (const auto& sentence : sentences) {
    std::string line;
    for (size_t i = 0; i < sentence.size(); ++i) {
      if (i) line += ' ';
      line += utf8_encode(sentence[i]);
    }
    out << line << '\n';
  }
}

}  // namespace translit
