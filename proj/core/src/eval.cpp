#include "translit/eval.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "translit/edit_distance.hpp"
#include "translit/error.hpp"
#include "translit/utf8.hpp"

namespace translit {

namespace {

// Order-free mean: sort the addends first, so equal multisets give
// bit-identical results regardless of how the examples were enumerated.
double canonical_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

EvalReport label_error_rate(const std::vector<std::u32string>& predictions,
                            const std::vector<std::u32string>& truths,
                            const std::vector<std::u32string>* inputs) {
  if (predictions.size() != truths.size()) {
    throw Error("label_error_rate: prediction/truth counts differ");
  }
  if (inputs && inputs->size() != truths.size()) {
    throw Error("label_error_rate: input/truth counts differ");
  }
  EvalReport report;
  std::vector<double> ratios;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].empty()) {
      ++report.excluded_empty_truth;
      continue;
    }
    ExampleScore ex;
    if (inputs) ex.input = (*inputs)[i];
    ex.prediction = predictions[i];
    ex.truth = truths[i];
    ex.distance = edit_distance(ex.prediction, ex.truth);
    ex.normalized = static_cast<double>(ex.distance) / static_cast<double>(ex.truth.size());
    ex.ops = format_edit_ops(edit_ops(ex.prediction, ex.truth));
    ratios.push_back(ex.normalized);
    report.per_example.push_back(std::move(ex));
  }
  report.evaluated = ratios.size();
  report.ler = canonical_mean(std::move(ratios));
  return report;
}

void add_word_level(EvalReport& report) {
  std::vector<double> ratios;
  report.word_count = 0;
  report.word_mismatch_sequences = 0;
  for (const auto& ex : report.per_example) {
    auto pred_words = split_words(ex.prediction);
    auto truth_words = split_words(ex.truth);
    if (pred_words.size() != truth_words.size()) {
      ++report.word_mismatch_sequences;
      continue;
    }
    for (size_t w = 0; w < truth_words.size(); ++w) {
      if (truth_words[w].empty()) continue;
      int d = edit_distance(pred_words[w], truth_words[w]);
      ratios.push_back(static_cast<double>(d) / static_cast<double>(truth_words[w].size()));
      ++report.word_count;
    }
  }
  report.word_ler = canonical_mean(std::move(ratios));
}

ParallelCorpus shuffle_words(const ParallelCorpus& corpus, uint64_t seed) {
  ParallelCorpus out = corpus;
  std::mt19937_64 rng(seed);
  std::shuffle(out.pairs.begin(), out.pairs.end(), rng);
  return out;
}

double topk_analysis(const std::vector<std::vector<std::u32string>>& beams,
                     const std::vector<std::u32string>& truths) {
  if (beams.size() != truths.size()) {
    throw Error("topk_analysis: beam/truth counts differ");
  }
  if (truths.empty()) return 0.0;
  size_t k = beams.empty() ? 0 : beams[0].size();
  for (const auto& b : beams) {
    if (b.size() != k) throw Error("topk_analysis: k differs across examples");
  }
  size_t hits = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (std::find(beams[i].begin(), beams[i].end(), truths[i]) != beams[i].end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "index\tinput\tprediction\ttruth\tdistance\tnormalized\terrors\n";
  for (size_t i = 0; i < report.per_example.size(); ++i) {
    const auto& ex = report.per_example[i];
    out << i << '\t' << utf8_encode(ex.input) << '\t' << utf8_encode(ex.prediction) << '\t'
        << utf8_encode(ex.truth) << '\t' << ex.distance << '\t' << ex.normalized << '\t'
        << ex.ops << '\n';
  }
  out << "\n# summary\n";
  out << "examples\t" << report.evaluated << '\n';
  out << "excluded_empty_truth\t" << report.excluded_empty_truth << '\n';
  out << "ler\t" << report.ler << '\n';
  if (report.word_ler) {
    out << "word_ler\t" << *report.word_ler << '\n';
    out << "words\t" << report.word_count << '\n';
    out << "word_mismatch_sequences\t" << report.word_mismatch_sequences << '\n';
  }
  if (report.topk_hit_rate) {
    out << "topk_hit_rate\t" << *report.topk_hit_rate << '\n';
  }
}

}  // namespace translit
