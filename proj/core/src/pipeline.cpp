#include "translit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "translit/error.hpp"
#include "translit/hash.hpp"

namespace translit {

uint64_t derive_seed(uint64_t root, std::string_view label, uint64_t index) {
  uint64_t h = fnv1a64(label);
  h = fnv1a64(&root, sizeof(root), h);
  h = fnv1a64(&index, sizeof(index), h);
  return h;
}

std::vector<SymbolId> apply_input_dropout(std::span<const SymbolId> ids, double rate,
                                          std::mt19937_64& rng, const Alphabet& alphabet) {
  if (rate < 0.0 || rate >= 1.0) throw Error("dropout rate must be in [0, 1)");
  std::vector<SymbolId> out(ids.begin(), ids.end());
  if (rate == 0.0) return out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (SymbolId& id : out) {
    if (id == alphabet.blank_id() || alphabet.space_like(id)) continue;
    if (unit(rng) < rate) id = alphabet.blank_id();
  }
  return out;
}

namespace {

struct PretrainSymbols {
  std::vector<SymbolId> source;            // eligible source symbols
  std::vector<SymbolId> image;             // their single-grapheme target ids
};

PretrainSymbols eligible_pretrain_symbols(const MappingTable& table,
                                          const Alphabet& source_alphabet,
                                          const Alphabet& target_alphabet) {
  PretrainSymbols out;
  for (const auto& [g, image] : table.baseline) {
    if (image.size() != 1) continue;
    auto src = source_alphabet.find(g);
    auto tgt = target_alphabet.find(image[0]);
    if (!src || !tgt) continue;
    if (source_alphabet.is_reserved(*src) || target_alphabet.is_reserved(*tgt)) continue;
    out.source.push_back(*src);
    out.image.push_back(*tgt);
  }
  if (out.source.empty()) {
    throw Error("pretraining needs at least one single-grapheme baseline mapping");
  }
  return out;
}

TrainingBatch assemble_batch(const std::vector<TrainingSequence>& seqs, size_t begin,
                             size_t end) {
  TrainingBatch batch;
  Eigen::Index max_len = 1;
  for (size_t i = begin; i < end; ++i) {
    max_len = std::max<Eigen::Index>(max_len,
                                     static_cast<Eigen::Index>(seqs[i].input.size()));
  }
  batch.inputs.setConstant(static_cast<Eigen::Index>(end - begin), max_len,
                           Alphabet::kBlankId);
  for (size_t i = begin; i < end; ++i) {
    const auto& s = seqs[i];
    batch.input_lengths.push_back(static_cast<int>(s.input.size()));
    batch.targets.push_back(s.target);
    for (size_t t = 0; t < s.input.size(); ++t) {
      batch.inputs(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(t)) =
          s.input[t];
    }
  }
  return batch;
}

std::vector<SymbolId> row_ids(const TrainingBatch& batch, int row) {
  std::vector<SymbolId> ids(static_cast<size_t>(batch.input_lengths[static_cast<size_t>(row)]));
  for (size_t t = 0; t < ids.size(); ++t) {
    ids[t] = batch.inputs(row, static_cast<Eigen::Index>(t));
  }
  return ids;
}

// Frame-wise cross entropy over one sequence: mean over frames of
// -log p(target_t). Returns loss and accumulates parameter gradients.
double cross_entropy_step(const ModelParams<float>& params, std::span<const SymbolId> input,
                          std::span<const SymbolId> frame_targets, ModelParams<float>* grads,
                          int* correct_frames) {
  auto trace = forward(params, input);
  const Eigen::Index frames = trace.log_probs.rows();
  if (frame_targets.size() != static_cast<size_t>(frames)) {
    throw Error("cross entropy: target must give one class per frame");
  }
  double loss = 0.0;
  Mat<float> grad_lp;
  if (grads) grad_lp = Mat<float>::Zero(frames, trace.log_probs.cols());
  for (Eigen::Index t = 0; t < frames; ++t) {
    SymbolId cls = frame_targets[static_cast<size_t>(t)];
    loss -= static_cast<double>(trace.log_probs(t, cls));
    if (grads) grad_lp(t, cls) = -1.0f / static_cast<float>(frames);
    if (correct_frames) {
      Eigen::Index best = 0;
      trace.log_probs.row(t).maxCoeff(&best);
      if (static_cast<SymbolId>(best) == cls) ++*correct_frames;
    }
  }
  loss /= static_cast<double>(frames);
  if (grads) {
    ModelParams<float> g = backward(params, trace, grad_lp);
    std::vector<Mat<float>*> dst, src;
    visit_params(*grads, [&](const std::string&, Mat<float>& m) { dst.push_back(&m); });
    visit_params(g, [&](const std::string&, Mat<float>& m) { src.push_back(&m); });
    for (size_t i = 0; i < dst.size(); ++i) *dst[i] += *src[i];
  }
  return loss;
}

void accumulate(ModelParams<float>& into, const ModelParams<float>& from) {
  std::vector<Mat<float>*> dst;
  std::vector<const Mat<float>*> src;
  visit_params(into, [&](const std::string&, Mat<float>& m) { dst.push_back(&m); });
  visit_params(const_cast<ModelParams<float>&>(from),
               [&](const std::string&, const Mat<float>& m) { src.push_back(&m); });
  for (size_t i = 0; i < dst.size(); ++i) *dst[i] += *src[i];
}

void scale_params(ModelParams<float>& p, float factor) {
  visit_params(p, [factor](const std::string&, Mat<float>& m) { m *= factor; });
}

}  // namespace

TrainingBatch make_pretrain_batch(const MappingTable& table, const Alphabet& source_alphabet,
                                  const Alphabet& target_alphabet, const PretrainConfig& cfg,
                                  int doubling_factor, std::mt19937_64& rng) {
  if (cfg.sequence_length < 1 || cfg.batch_size < 1) {
    throw Error("pretrain batch: sequence_length and batch_size must be >= 1");
  }
  PretrainSymbols symbols = eligible_pretrain_symbols(table, source_alphabet, target_alphabet);
  std::uniform_int_distribution<size_t> pick(0, symbols.source.size() - 1);
  const int repeat = std::max(doubling_factor, 1);

  std::vector<TrainingSequence> seqs(static_cast<size_t>(cfg.batch_size));
  for (auto& s : seqs) {
    s.input.reserve(static_cast<size_t>(cfg.sequence_length * repeat));
    s.target.reserve(static_cast<size_t>(cfg.sequence_length * repeat));
    for (int i = 0; i < cfg.sequence_length; ++i) {
      size_t j = pick(rng);
      for (int r = 0; r < repeat; ++r) {
        s.input.push_back(symbols.source[j]);
        s.target.push_back(symbols.image[j]);
      }
    }
  }
  return assemble_batch(seqs, 0, seqs.size());
}

SequenceSet build_training_sequences(const ParallelCorpus& corpus, const TrainConfig& cfg,
                                     std::mt19937_64& dropout_rng, bool with_dropout) {
  SequenceSet set;
  const Alphabet& src_ab = corpus.source_alphabet;
  for (size_t s = 0; s < corpus.sentence_count(); ++s) {
    auto [begin, end] = corpus.sentence_range(s);
    std::vector<Token> source_words, target_words;
    for (size_t i = begin; i < end; ++i) {
      source_words.push_back(corpus.pairs[i].source);
      target_words.push_back(corpus.pairs[i].target);
    }
    for (auto [wb, we] : chunk_ranges(source_words, cfg.chunk_window)) {
      TrainingSequence seq;
      seq.origin = corpus.origin;
      for (size_t w = wb; w < we; ++w) {
        if (w > wb) {
          seq.input.push_back(src_ab.space_id());
          seq.target.push_back(corpus.target_alphabet.space_id());
        }
        seq.input.insert(seq.input.end(), source_words[w].graphemes.begin(),
                         source_words[w].graphemes.end());
        seq.target.insert(seq.target.end(), target_words[w].graphemes.begin(),
                          target_words[w].graphemes.end());
      }
      if (with_dropout && cfg.dropout.rate > 0.0) {
        seq.input = apply_input_dropout(seq.input, cfg.dropout.rate, dropout_rng, src_ab);
      }
      if (cfg.doubling_factor >= 2) {
        seq.input = double_input(seq.input, cfg.doubling_factor);
      }
      if (static_cast<int>(seq.input.size()) < ctc_min_frames(seq.target)) {
        ++set.rejected;
        continue;
      }
      ++set.admitted;
      set.sequences.push_back(std::move(seq));
    }
  }
  return set;
}

PretrainResult pretrain(ModelParams<float>& params, const MappingTable& table,
                        const Alphabet& source_alphabet, const Alphabet& target_alphabet,
                        const PretrainConfig& cfg, const OptimizerConfig& opt,
                        int doubling_factor, uint64_t seed) {
  if (cfg.max_steps <= 0) throw Error("pretrain: max_steps must be positive");
  std::mt19937_64 train_rng(derive_seed(seed, "pretrain.train"));
  std::mt19937_64 eval_rng(derive_seed(seed, "pretrain.eval"));

  auto held_out_accuracy = [&] {
    std::mt19937_64 rng = eval_rng;  // same held-out stream every check
    long correct = 0, total = 0;
    for (int b = 0; b < cfg.eval_batches; ++b) {
      TrainingBatch batch =
          make_pretrain_batch(table, source_alphabet, target_alphabet, cfg, doubling_factor, rng);
      for (int r = 0; r < batch.size(); ++r) {
        int ok = 0;
        cross_entropy_step(params, row_ids(batch, r), batch.targets[static_cast<size_t>(r)],
                           nullptr, &ok);
        correct += ok;
        total += static_cast<long>(batch.targets[static_cast<size_t>(r)].size());
      }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  };

  PretrainResult result;
  result.accuracy = held_out_accuracy();
  result.history.emplace_back(0, result.accuracy);
  if (result.accuracy >= cfg.accuracy_target) {
    result.reached_target = true;
    return result;
  }

  OptimizerState<float> state(opt);
  for (long step = 1; step <= cfg.max_steps; ++step) {
    TrainingBatch batch = make_pretrain_batch(table, source_alphabet, target_alphabet, cfg,
                                              doubling_factor, train_rng);
    ModelParams<float> grads = zeros_like_params<float>(params.dims());
    for (int r = 0; r < batch.size(); ++r) {
      cross_entropy_step(params, row_ids(batch, r), batch.targets[static_cast<size_t>(r)],
                         &grads, nullptr);
    }
    scale_params(grads, 1.0f / static_cast<float>(batch.size()));
    rmsprop_update(params, grads, state);
    result.steps = step;

    if (step % cfg.eval_every == 0 || step == cfg.max_steps) {
      result.accuracy = held_out_accuracy();
      result.history.emplace_back(step, result.accuracy);
      if (result.accuracy >= cfg.accuracy_target) {
        result.reached_target = true;
        return result;
      }
    }
  }
  return result;  // budget exhausted; caller decides severity
}

namespace {

struct BatchPartial {
  ModelParams<float> grads;
  double loss_sum = 0.0;
  bool finite = true;
};

BatchPartial batch_gradients(const ModelParams<float>& params,
                             const std::vector<TrainingSequence>& seqs, size_t begin,
                             size_t end) {
  BatchPartial out;
  out.grads = zeros_like_params<float>(params.dims());
  for (size_t i = begin; i < end; ++i) {
    auto trace = forward(params, seqs[i].input);
    auto ctc = ctc_loss(trace.log_probs, seqs[i].target, Alphabet::kBlankId);
    if (!std::isfinite(static_cast<double>(ctc.loss))) {
      out.finite = false;
      return out;
    }
    out.loss_sum += static_cast<double>(ctc.loss);
    ModelParams<float> g = backward(params, trace, ctc.grad);
    accumulate(out.grads, g);
  }
  return out;
}

}  // namespace

TrainResult train(ModelParams<float>& params, const std::vector<ParallelCorpus>& corpora,
                  const ParallelCorpus* test_corpus, const TrainConfig& cfg) {
  TrainResult result;
  OptimizerState<float> state(cfg.optimizer);
  ModelParams<float> last_good = params;

  std::optional<SequenceSet> test_set;
  if (test_corpus) {
    std::mt19937_64 null_rng(0);
    test_set = build_training_sequences(*test_corpus, cfg, null_rng, false);
  }

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Rebuild sequences each epoch: dropout is resampled, order reshuffled.
    std::mt19937_64 dropout_rng(derive_seed(cfg.seed, "dropout", static_cast<uint64_t>(epoch)));
    std::vector<TrainingSequence> train_seqs;
    for (const auto& corpus : corpora) {
      bool with_dropout = corpus.origin == Origin::synthetic ? cfg.dropout.apply_to_synthetic
                                                             : cfg.dropout.apply_to_real;
      SequenceSet set = build_training_sequences(corpus, cfg, dropout_rng, with_dropout);
      for (auto& s : set.sequences) train_seqs.push_back(std::move(s));
    }
    if (train_seqs.empty()) throw Error("train: no admissible training sequences");

    if (cfg.shuffle_between_epochs) {
      std::mt19937_64 order_rng(derive_seed(cfg.seed, "shuffle", static_cast<uint64_t>(epoch)));
      if (cfg.shuffle_real) {
        std::shuffle(train_seqs.begin(), train_seqs.end(), order_rng);
      } else {
        // Keep real sequences in corpus order, shuffle only the synthetic.
        std::vector<size_t> synth_pos;
        std::vector<TrainingSequence> synth;
        for (size_t i = 0; i < train_seqs.size(); ++i) {
          if (train_seqs[i].origin == Origin::synthetic) {
            synth_pos.push_back(i);
            synth.push_back(train_seqs[i]);
          }
        }
        std::shuffle(synth.begin(), synth.end(), order_rng);
        for (size_t k = 0; k < synth_pos.size(); ++k) {
          train_seqs[synth_pos[k]] = std::move(synth[k]);
        }
      }
    }

    double epoch_loss = 0.0;
    size_t epoch_count = 0;
    for (size_t begin = 0; begin < train_seqs.size();
         begin += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(train_seqs.size(), begin + static_cast<size_t>(cfg.batch_size));
      BatchPartial total;
      if (cfg.threads > 1) {
        size_t n = end - begin;
        size_t shard = (n + static_cast<size_t>(cfg.threads) - 1) /
                       static_cast<size_t>(cfg.threads);
        std::vector<std::future<BatchPartial>> futures;
        for (size_t s = begin; s < end; s += shard) {
          size_t e = std::min(end, s + shard);
          futures.push_back(std::async(std::launch::async, batch_gradients, std::cref(params),
                                       std::cref(train_seqs), s, e));
        }
        total.grads = zeros_like_params<float>(params.dims());
        for (auto& f : futures) {
          BatchPartial part = f.get();
          total.finite = total.finite && part.finite;
          total.loss_sum += part.loss_sum;
          accumulate(total.grads, part.grads);
        }
      } else {
        total = batch_gradients(params, train_seqs, begin, end);
      }

      if (!total.finite || !std::isfinite(total.loss_sum) || !total.grads.all_finite()) {
        params = last_good;
        result.diverged = true;
        result.message = "loss diverged in epoch " + std::to_string(epoch) +
                         "; parameters rolled back to the end of epoch " +
                         std::to_string(epoch - 1);
        return result;
      }
      scale_params(total.grads, 1.0f / static_cast<float>(end - begin));
      rmsprop_update(params, total.grads, state);
      epoch_loss += total.loss_sum;
      epoch_count += end - begin;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_count == 0 ? 0.0 : epoch_loss / static_cast<double>(epoch_count);
    if (test_set) {
      double loss_sum = 0.0;
      size_t loss_count = 0;
      std::vector<std::u32string> predictions, truths;
      const Alphabet& tgt_ab = test_corpus->target_alphabet;
      for (const auto& seq : test_set->sequences) {
        auto trace = forward(params, seq.input);
        auto ctc = ctc_loss(trace.log_probs, seq.target, Alphabet::kBlankId);
        loss_sum += static_cast<double>(ctc.loss);
        ++loss_count;
        predictions.push_back(tgt_ab.decode(greedy_decode(trace.log_probs, Alphabet::kBlankId)));
        truths.push_back(tgt_ab.decode(seq.target));
      }
      record.test_loss = loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count);
      record.test_ler = label_error_rate(predictions, truths).ler;
    }
    result.log.push_back(record);
    last_good = params;
  }
  return result;
}

ModelEvalResult evaluate_model(const ModelParams<float>& params, const ParallelCorpus& corpus,
                               const EvalOptions& options) {
  TrainConfig cfg;
  cfg.chunk_window = options.chunk_window;
  cfg.doubling_factor = options.doubling_factor;
  cfg.dropout.rate = 0.0;
  std::mt19937_64 null_rng(0);
  SequenceSet set = build_training_sequences(corpus, cfg, null_rng, false);

  ModelEvalResult out;
  const Alphabet& tgt_ab = corpus.target_alphabet;
  const Alphabet& src_ab = corpus.source_alphabet;
  std::vector<std::u32string> predictions, truths, inputs;
  double loss_sum = 0.0;
  size_t loss_count = 0;
  for (const auto& seq : set.sequences) {
    auto trace = forward(params, seq.input);
    auto ctc = ctc_loss(trace.log_probs, seq.target, Alphabet::kBlankId);
    loss_sum += static_cast<double>(ctc.loss);
    ++loss_count;
    predictions.push_back(tgt_ab.decode(greedy_decode(trace.log_probs, Alphabet::kBlankId)));
    truths.push_back(tgt_ab.decode(seq.target));
    inputs.push_back(src_ab.decode(seq.input));
    if (options.beam_width > 0 && options.topk > 0) {
      std::vector<std::u32string> kbest;
      for (const auto& hyp :
           beam_decode(trace.log_probs, options.beam_width, options.topk, Alphabet::kBlankId)) {
        kbest.push_back(tgt_ab.decode(hyp.label));
      }
      while (kbest.size() < static_cast<size_t>(options.topk)) kbest.emplace_back();
      out.beams.push_back(std::move(kbest));
    }
  }
  out.mean_loss = loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count);
  out.report = label_error_rate(predictions, truths, &inputs);
  add_word_level(out.report);
  if (!out.beams.empty()) {
    out.report.topk_hit_rate = topk_analysis(out.beams, truths);
  }
  return out;
}

std::pair<ParallelCorpus, ParallelCorpus> split_corpus(const ParallelCorpus& corpus,
                                                       double test_fraction, uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction > 1.0) {
    throw Error("test fraction must be in [0, 1]");
  }
  std::vector<size_t> order(corpus.sentence_count());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  size_t test_n = static_cast<size_t>(std::llround(test_fraction *
                                                   static_cast<double>(order.size())));
  std::vector<bool> is_test(corpus.sentence_count(), false);
  for (size_t i = 0; i < test_n; ++i) is_test[order[i]] = true;

  ParallelCorpus train_part, test_part;
  for (ParallelCorpus* part : {&train_part, &test_part}) {
    part->source_alphabet = corpus.source_alphabet;
    part->target_alphabet = corpus.target_alphabet;
    part->origin = corpus.origin;
  }
  for (size_t s = 0; s < corpus.sentence_count(); ++s) {
    auto [begin, end] = corpus.sentence_range(s);
    std::vector<WordPair> sentence(corpus.pairs.begin() + static_cast<long>(begin),
                                   corpus.pairs.begin() + static_cast<long>(end));
    (is_test[s] ? test_part : train_part).append_sentence(std::move(sentence));
  }
  return {std::move(train_part), std::move(test_part)};
}

}  // namespace translit
