#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "translit/chunk.hpp"
#include "translit/corpus.hpp"
#include "translit/ctc.hpp"
#include "translit/eval.hpp"
#include "translit/mapping.hpp"
#include "translit/net.hpp"

namespace translit {

struct PretrainConfig {
  int sequence_length = 10;
  int batch_size = 128;
  long max_steps = 2000;
  double accuracy_target = 0.95;
  int eval_every = 25;   // accuracy check cadence, in steps
  int eval_batches = 2;  // held-out batches per check
};

struct DropoutConfig {
  double rate = 0.15;
  bool apply_to_real = false;
  bool apply_to_synthetic = true;
};

struct TrainConfig {
  int batch_size = 128;
  int chunk_window = 20;
  int doubling_factor = 2;  // 1 disables the length adaptation
  PretrainConfig pretrain;
  DropoutConfig dropout;
  int epochs = 10;
  bool shuffle_between_epochs = true;  // synthetic sequence order
  bool shuffle_real = true;
  OptimizerConfig optimizer;
  uint64_t seed = 1;
  int threads = 1;
};

// A chunked, doubled training instance. `target` is the label sequence for
// the CTC loss (frame-aligned classes for the pretrain stage instead).
struct TrainingSequence {
  std::vector<SymbolId> input;
  std::vector<SymbolId> target;
  Origin origin = Origin::real;
};

struct TrainingBatch {
  Eigen::Matrix<SymbolId, Eigen::Dynamic, Eigen::Dynamic> inputs;  // B x Tmax, blank-padded
  std::vector<int> input_lengths;
  std::vector<std::vector<SymbolId>> targets;

  int size() const { return static_cast<int>(input_lengths.size()); }
};

// Independently replaces each droppable symbol (not a separator, mask,
// filler, or punctuation) with the blank, with probability `rate`. Applied
// before doubling; never touches targets.
std::vector<SymbolId> apply_input_dropout(std::span<const SymbolId> ids, double rate,
                                          std::mt19937_64& rng, const Alphabet& alphabet);

// Uniform random source sequences of fixed length paired with their
// per-grapheme baseline images, both expanded to the doubled frame count so
// a frame-wise cross entropy is defined at every timestep. Only source
// graphemes with a single-grapheme baseline image participate.
TrainingBatch make_pretrain_batch(const MappingTable& table, const Alphabet& source_alphabet,
                                  const Alphabet& target_alphabet, const PretrainConfig& cfg,
                                  int doubling_factor, std::mt19937_64& rng);

struct SequenceSet {
  std::vector<TrainingSequence> sequences;
  size_t admitted = 0;
  size_t rejected = 0;  // pairs violating CTC definability after doubling
};

// Chunks every sentence of the corpus into training sequences: words joined
// by single spaces, optional input dropout, then doubling. Sequences whose
// label outgrows the adapted input are excluded and counted.
SequenceSet build_training_sequences(const ParallelCorpus& corpus, const TrainConfig& cfg,
                                     std::mt19937_64& dropout_rng, bool with_dropout);

struct PretrainResult {
  long steps = 0;
  double accuracy = 0.0;
  bool reached_target = false;
  std::vector<std::pair<long, double>> history;  // (step, held-out accuracy)
};

// Stage one: frame-wise cross entropy on random single-letter sequences
// until the held-out frame accuracy target is met. Errors out when the
// budget is exhausted first (the result carries the final accuracy).
PretrainResult pretrain(ModelParams<float>& params, const MappingTable& table,
                        const Alphabet& source_alphabet, const Alphabet& target_alphabet,
                        const PretrainConfig& cfg, const OptimizerConfig& opt,
                        int doubling_factor, uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_ler = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  bool diverged = false;
  std::string message;
};

struct EvalOptions {
  int chunk_window = 20;
  int doubling_factor = 2;
  int beam_width = 0;  // 0: greedy only
  int topk = 0;
};

struct ModelEvalResult {
  EvalReport report;
  double mean_loss = 0.0;
  std::vector<std::vector<std::u32string>> beams;  // per sequence, when requested
};

// Stage two: CTC training over chunked corpora. Dropout applies to corpora
// selected by cfg.dropout (synthetic only, unless widened); synthetic
// sequences are reshuffled between epochs. A non-finite loss aborts the run
// and `params` is rolled back to the end of the last clean epoch.
TrainResult train(ModelParams<float>& params, const std::vector<ParallelCorpus>& corpora,
                  const ParallelCorpus* test_corpus, const TrainConfig& cfg);

ModelEvalResult evaluate_model(const ModelParams<float>& params, const ParallelCorpus& corpus,
                               const EvalOptions& options);

// Seeded sentence-level split; second element holds ~fraction of sentences.
std::pair<ParallelCorpus, ParallelCorpus> split_corpus(const ParallelCorpus& corpus,
                                                       double test_fraction, uint64_t seed);

// Stable per-subsystem seed derivation.
uint64_t derive_seed(uint64_t root, std::string_view label, uint64_t index = 0);

}  // namespace translit
