#include "translit/align.hpp"

#include <algorithm>

#include "translit/edit_distance.hpp"
#include "translit/error.hpp"

namespace translit {

namespace {

bool is_mask_word(std::u32string_view w) {
  return w.size() == 1 && w[0] == Alphabet::kMaskChar;
}

bool is_punct_word(std::u32string_view w) {
  if (w.empty()) return false;
  return std::all_of(w.begin(), w.end(), is_punctuation);
}

constexpr uint8_t kMatch = 0;
constexpr uint8_t kSkipSource = 1;
constexpr uint8_t kSkipTarget = 2;

}  // namespace

int cross_script_distance(std::u32string_view source_word, std::u32string_view target_word,
                          const MappingTable& table) {
  std::u32string mapped = generate_pseudo_source(target_word, table);
  return edit_distance(source_word, mapped);
}

AlignmentTrace align(const std::vector<std::u32string>& source_words,
                     const std::vector<std::u32string>& target_words,
                     const AlignConfig& cfg) {
  if (!cfg.mapping) throw Error("align: no mapping table configured");
  const size_t n = source_words.size();
  const size_t m = target_words.size();

  std::vector<std::u32string> mapped(m);
  for (size_t j = 0; j < m; ++j) mapped[j] = generate_pseudo_source(target_words[j], *cfg.mapping);

  auto cell_cost = [&](size_t i, size_t j) {
    return static_cast<long>(edit_distance(source_words[i], mapped[j]));
  };
  auto skip_source_cost = [&](size_t i) { return static_cast<long>(source_words[i].size()); };
  auto skip_target_cost = [&](size_t j) { return static_cast<long>(mapped[j].size()); };

  // Only two score rows live at a time, rolled along the shorter sequence;
  // the full n*m byte matrix of choices remains for traceback.
  std::vector<uint8_t> tags(n * m, kMatch);
  auto tag = [&](size_t i, size_t j) -> uint8_t& { return tags[(i - 1) * m + (j - 1)]; };

  long total = 0;
  size_t slots = 0;
  if (n == 0 || m == 0) {
    for (size_t i = 0; i < n; ++i) total += skip_source_cost(i);
    for (size_t j = 0; j < m; ++j) total += skip_target_cost(j);
  } else if (m <= n) {
    std::vector<long> prev(m + 1), cur(m + 1);
    slots = prev.size() + cur.size();
    for (size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + skip_target_cost(j - 1);
    for (size_t i = 1; i <= n; ++i) {
      cur[0] = prev[0] + skip_source_cost(i - 1);
      for (size_t j = 1; j <= m; ++j) {
        long match = prev[j - 1] + cell_cost(i - 1, j - 1);
        long skip_s = prev[j] + skip_source_cost(i - 1);
        long skip_t = cur[j - 1] + skip_target_cost(j - 1);
        long best = match;
        uint8_t choice = kMatch;
        if (skip_s < best) {
          best = skip_s;
          choice = kSkipSource;
        }
        if (skip_t < best) {
          best = skip_t;
          choice = kSkipTarget;
        }
        cur[j] = best;
        tag(i, j) = choice;
      }
      std::swap(prev, cur);
    }
    total = prev[m];
  } else {
    // Roll along the source side instead; same recurrence, same tie order.
    std::vector<long> prev(n + 1), cur(n + 1);
    slots = prev.size() + cur.size();
    for (size_t i = 1; i <= n; ++i) prev[i] = prev[i - 1] + skip_source_cost(i - 1);
    for (size_t j = 1; j <= m; ++j) {
      cur[0] = prev[0] + skip_target_cost(j - 1);
      for (size_t i = 1; i <= n; ++i) {
        long match = prev[i - 1] + cell_cost(i - 1, j - 1);
        long skip_s = cur[i - 1] + skip_source_cost(i - 1);
        long skip_t = prev[i] + skip_target_cost(j - 1);
        long best = match;
        uint8_t choice = kMatch;
        if (skip_s < best) {
          best = skip_s;
          choice = kSkipSource;
        }
        if (skip_t < best) {
          best = skip_t;
          choice = kSkipTarget;
        }
        cur[i] = best;
        tag(i, j) = choice;
      }
      std::swap(prev, cur);
    }
    total = prev[n];
  }

  AlignmentTrace trace;
  trace.total_cost = total;
  trace.score_slots = slots;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    AlignStep step;
    if (i == 0) {
      step.kind = AlignStep::Kind::skip_target;
      step.target_index = static_cast<int32_t>(--j);
    } else if (j == 0) {
      step.kind = AlignStep::Kind::skip_source;
      step.source_index = static_cast<int32_t>(--i);
    } else {
      switch (tag(i, j)) {
        case kMatch:
          step.kind = AlignStep::Kind::match;
          step.source_index = static_cast<int32_t>(--i);
          step.target_index = static_cast<int32_t>(--j);
          break;
        case kSkipSource:
          step.kind = AlignStep::Kind::skip_source;
          step.source_index = static_cast<int32_t>(--i);
          break;
        default:
          step.kind = AlignStep::Kind::skip_target;
          step.target_index = static_cast<int32_t>(--j);
          break;
      }
    }
    trace.steps.push_back(step);
  }
  std::reverse(trace.steps.begin(), trace.steps.end());
  return trace;
}

std::vector<WordPair> extract_pairs(const AlignmentTrace& trace,
                                    const std::vector<std::u32string>& source_words,
                                    const std::vector<std::u32string>& target_words,
                                    const AlignConfig& cfg, const Alphabet& source_alphabet,
                                    const Alphabet& target_alphabet) {
  if (!cfg.mapping) throw Error("extract_pairs: no mapping table configured");
  std::vector<WordPair> pairs;
  pairs.reserve(trace.steps.size());
  auto masked_pair = [] {
    WordPair p;
    p.source = Token::masked();
    p.target = Token::masked();
    return p;
  };
  for (const AlignStep& step : trace.steps) {
    if (step.kind != AlignStep::Kind::match) {
      pairs.push_back(masked_pair());
      continue;
    }
    std::u32string src = source_words.at(static_cast<size_t>(step.source_index));
    std::u32string tgt = target_words.at(static_cast<size_t>(step.target_index));
    if (is_mask_word(src) || is_mask_word(tgt)) {
      pairs.push_back(masked_pair());
      continue;
    }
    // Punctuation disagreements resolve in favor of the source side.
    if (is_punct_word(src) && is_punct_word(tgt) && src != tgt) tgt = src;

    int dist = cross_script_distance(src, tgt, *cfg.mapping);
    size_t mapped_len = generate_pseudo_source(tgt, *cfg.mapping).size();
    size_t denom = std::max(src.size(), mapped_len);
    double similarity = denom == 0 ? 0.0 : static_cast<double>(dist) / static_cast<double>(denom);
    if (similarity > cfg.keep_threshold) {
      pairs.push_back(masked_pair());
      continue;
    }
    WordPair p;
    p.source = Token::from_text(src, source_alphabet);
    p.target = Token::from_text(tgt, target_alphabet);
    p.similarity = similarity;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

AlignOutcome align_corpus(const std::vector<std::vector<std::u32string>>& source_sentences,
                          const std::vector<std::vector<std::u32string>>& target_sentences,
                          const AlignConfig& cfg, const Alphabet& source_alphabet,
                          const Alphabet& target_alphabet) {
  AlignOutcome out;
  out.corpus.source_alphabet = source_alphabet;
  out.corpus.target_alphabet = target_alphabet;
  out.corpus.origin = Origin::real;

  auto run_one = [&](const std::vector<std::u32string>& src,
                     const std::vector<std::u32string>& tgt) {
    AlignmentTrace trace = align(src, tgt, cfg);
    auto pairs = extract_pairs(trace, src, tgt, cfg, source_alphabet, target_alphabet);
    AlignSentenceStats stats;
    stats.cost = trace.total_cost;
    for (const auto& p : pairs) {
      if (p.source.is_masked) {
        ++stats.masked;
      } else {
        ++stats.kept;
      }
    }
    out.stats.push_back(stats);
    out.corpus.append_sentence(std::move(pairs));
  };

  if (source_sentences.size() == target_sentences.size()) {
    for (size_t s = 0; s < source_sentences.size(); ++s) {
      run_one(source_sentences[s], target_sentences[s]);
    }
  } else {
    std::vector<std::u32string> src, tgt;
    for (const auto& s : source_sentences) src.insert(src.end(), s.begin(), s.end());
    for (const auto& t : target_sentences) tgt.insert(tgt.end(), t.begin(), t.end());
    run_one(src, tgt);
  }
  return out;
}

}  // namespace translit
