// Command-line front end: align, synth, baseline, pretrain, train,
// transliterate, evaluate, smoke. Every run writes a .manifest.txt next to
// its primary output with seeds and file digests; data artifacts themselves
// carry no timestamps, so fixed-seed reruns are byte-identical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "translit/align.hpp"
#include "translit/checkpoint.hpp"
#include "translit/chunk.hpp"
#include "translit/corpus.hpp"
#include "translit/ctc.hpp"
#include "translit/error.hpp"
#include "translit/eval.hpp"
#include "translit/manifest.hpp"
#include "translit/mapping.hpp"
#include "translit/net.hpp"
#include "translit/normalize.hpp"
#include "translit/pipeline.hpp"
#include "translit/utf8.hpp"

namespace fs = std::filesystem;
using namespace translit;

namespace {

// Punctuation admitted into every alphabet regardless of the table.
const std::u32string kStockPunctuation = U".,;:!?()\"-،؛؟";

// Alphabets are a pure function of the mapping table (plus stock
// punctuation), so every command derives the same inventories and checkpoint
// fingerprints agree across runs.
std::pair<Alphabet, Alphabet> build_alphabets(const MappingTable& table) {
  std::set<char32_t> src, tgt;
  for (char32_t cp : kStockPunctuation) {
    src.insert(cp);
    tgt.insert(cp);
  }
  for (const auto& [g, image] : table.baseline) {
    src.insert(g);
    for (char32_t cp : image) tgt.insert(cp);
  }
  for (const auto& [g, image] : table.forward) {
    tgt.insert(g);
    for (char32_t cp : image) src.insert(cp);
  }
  return {Alphabet::make({src.begin(), src.end()}), Alphabet::make({tgt.begin(), tgt.end()})};
}

struct ModelFlags {
  int embed_dim = 8;
  int hidden_dim = 1024;
  int num_layers = 4;

  void attach(CLI::App* cmd) {
    cmd->add_option("--embed-dim", embed_dim, "letter embedding width");
    cmd->add_option("--hidden", hidden_dim, "recurrent units per direction");
    cmd->add_option("--layers", num_layers, "stacked bidirectional layers");
  }
};

struct OptimizerFlags {
  OptimizerConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lr", cfg.learning_rate, "RMSprop learning rate");
    cmd->add_option("--rms-decay", cfg.decay, "RMSprop decay");
    cmd->add_option("--rms-eps", cfg.epsilon, "RMSprop epsilon");
    cmd->add_option("--clip-norm", cfg.max_grad_norm, "max gradient norm, 0 = off");
  }
};

void warn_table_findings(const MappingTable& table) {
  for (const auto& finding : table.validate()) {
    std::cerr << "warning: " << finding << "\n";
  }
}

std::string format_log(const std::vector<EpochRecord>& log) {
  std::ostringstream os;
  os << "epoch\ttrain_loss\ttest_loss\ttest_ler\n";
  for (const auto& r : log) {
    os << r.epoch << '\t' << r.train_loss << '\t' << r.test_loss << '\t' << r.test_ler << '\n';
  }
  return os.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string source_file, target_file, mapping_file, out_pairs, out_report;
  double threshold = 0.5;
};

int run_align(const AlignArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  warn_table_findings(table);
  auto [src_ab, tgt_ab] = build_alphabets(table);
  AlignConfig cfg;
  cfg.keep_threshold = args.threshold;
  cfg.mapping = &table;

  auto source = read_sentences(args.source_file);
  auto target = read_sentences(args.target_file);
  AlignOutcome outcome = align_corpus(source, target, cfg, src_ab, tgt_ab);
  write_pair_file(args.out_pairs, outcome.corpus);

  std::ostringstream report;
  report << "sentence\tcost\tkept\tmasked\n";
  long total_cost = 0;
  size_t total_kept = 0, total_masked = 0;
  for (size_t s = 0; s < outcome.stats.size(); ++s) {
    const auto& st = outcome.stats[s];
    report << s << '\t' << st.cost << '\t' << st.kept << '\t' << st.masked << '\n';
    total_cost += st.cost;
    total_kept += st.kept;
    total_masked += st.masked;
  }
  report << "\ntotal_cost\t" << total_cost << "\nkept_pairs\t" << total_kept
         << "\nmasked_pairs\t" << total_masked << "\n";
  if (!args.out_report.empty()) write_text_file(args.out_report, report.str());
  std::cout << "aligned " << outcome.stats.size() << " sentences, kept " << total_kept
            << " pairs, masked " << total_masked << " (total cost " << total_cost << ")\n";

  RunManifest manifest("align");
  manifest.set("threshold", args.threshold);
  manifest.add_file_digest("source", args.source_file);
  manifest.add_file_digest("target", args.target_file);
  manifest.add_file_digest("mapping", args.mapping_file);
  manifest.add_file_digest("pairs_out", args.out_pairs);
  manifest.write(args.out_pairs + ".manifest.txt");
  return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string target_file, mapping_file, out_pairs;
  std::string policy_file;      // optional normalization
  std::string out_source_text;  // optional line-aligned text outputs
  std::string out_target_text;
};

int run_synth(const SynthArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  warn_table_findings(table);
  auto [src_ab, tgt_ab] = build_alphabets(table);

  NormalizationPolicy policy;
  if (!args.policy_file.empty()) policy = NormalizationPolicy::load(args.policy_file);

  ParallelCorpus corpus;
  corpus.source_alphabet = src_ab;
  corpus.target_alphabet = tgt_ab;
  corpus.origin = Origin::synthetic;

  std::vector<std::vector<std::u32string>> source_lines, target_lines;
  std::ifstream in(args.target_file, std::ios::binary);
  if (!in) throw Error("cannot open " + args.target_file);
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::u32string normalized = normalize_text(utf8_decode(raw), policy);
    auto words = split_words(normalized);
    if (words.empty()) continue;
    std::vector<WordPair> sentence;
    std::vector<std::u32string> src_words;
    for (const auto& word : words) {
      std::u32string pseudo;
      try {
        pseudo = generate_pseudo_source(word, table);
      } catch (const Error& e) {
        throw Error("line " + std::to_string(line_no) + ": " + e.what());
      }
      WordPair p;
      p.target = Token::from_text(word, tgt_ab);
      // A word of deleted marks only would leave an empty source; mask it.
      if (pseudo.empty() || pseudo == std::u32string(1, Alphabet::kMaskChar)) {
        p.source = Token::masked();
        p.target = Token::masked();
        src_words.emplace_back(U"H");
      } else {
        p.source = Token::from_text(pseudo, src_ab);
        src_words.push_back(pseudo);
      }
      sentence.push_back(std::move(p));
    }
    source_lines.push_back(src_words);
    target_lines.push_back(words);
    corpus.append_sentence(std::move(sentence));
  }

  write_pair_file(args.out_pairs, corpus);
  if (!args.out_source_text.empty()) write_sentences(args.out_source_text, source_lines);
  if (!args.out_target_text.empty()) write_sentences(args.out_target_text, target_lines);
  std::cout << "synthesized " << corpus.pairs.size() << " word pairs over "
            << corpus.sentence_count() << " sentences\n";

  RunManifest manifest("synth");
  manifest.add_file_digest("target", args.target_file);
  manifest.add_file_digest("mapping", args.mapping_file);
  manifest.add_file_digest("pairs_out", args.out_pairs);
  manifest.write(args.out_pairs + ".manifest.txt");
  return 0;
}

// ---------------------------------------------------------------------------
// baseline
// ---------------------------------------------------------------------------

struct BaselineArgs {
  std::string input_file, mapping_file, out_file;
  std::string reference_file, report_file;
  bool strict = false;
};

int run_baseline(const BaselineArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  warn_table_findings(table);
  auto lines = read_sentences(args.input_file);
  UnmappedPolicy policy = args.strict ? UnmappedPolicy::reject : UnmappedPolicy::passthrough_warn;

  int warnings = 0;
  std::vector<std::vector<std::u32string>> out_lines;
  std::vector<std::u32string> predictions;
  for (const auto& words : lines) {
    std::vector<std::u32string> out_words;
    std::u32string joined;
    for (size_t i = 0; i < words.size(); ++i) {
      out_words.push_back(baseline_transliterate(words[i], table, policy, &warnings));
      if (i) joined += U' ';
      joined += out_words.back();
    }
    out_lines.push_back(std::move(out_words));
    predictions.push_back(std::move(joined));
  }
  write_sentences(args.out_file, out_lines);
  if (warnings > 0) {
    std::cerr << "warning: " << warnings << " graphemes passed through unmapped\n";
  }

  if (!args.reference_file.empty()) {
    auto refs = read_sentences(args.reference_file);
    if (refs.size() != predictions.size()) {
      throw Error("reference line count differs from input");
    }
    std::vector<std::u32string> truths;
    for (const auto& words : refs) {
      std::u32string joined;
      for (size_t i = 0; i < words.size(); ++i) {
        if (i) joined += U' ';
        joined += words[i];
      }
      truths.push_back(joined);
    }
    EvalReport report = label_error_rate(predictions, truths);
    add_word_level(report);
    std::cout << "baseline LER " << report.ler;
    if (report.word_ler) std::cout << " (per-word " << *report.word_ler << ")";
    std::cout << " over " << report.evaluated << " lines\n";
    if (!args.report_file.empty()) write_report(args.report_file, report);
  }

  RunManifest manifest("baseline");
  manifest.add_file_digest("input", args.input_file);
  manifest.add_file_digest("mapping", args.mapping_file);
  manifest.add_file_digest("output", args.out_file);
  manifest.set("unmapped_warnings", static_cast<uint64_t>(warnings));
  manifest.write(args.out_file + ".manifest.txt");
  return 0;
}

// ---------------------------------------------------------------------------
// pretrain
// ---------------------------------------------------------------------------

struct PretrainArgs {
  std::string mapping_file, out_checkpoint, log_file;
  ModelFlags model;
  OptimizerFlags optimizer;
  PretrainConfig cfg;
  int doubling_factor = 2;
  uint64_t seed = 1;
};

int run_pretrain(const PretrainArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  warn_table_findings(table);
  auto [src_ab, tgt_ab] = build_alphabets(table);

  ModelDims dims{src_ab.size(), tgt_ab.size(), args.model.embed_dim, args.model.hidden_dim,
                 args.model.num_layers};
  auto params = random_params<float>(dims, derive_seed(args.seed, "init"));
  PretrainResult res = pretrain(params, table, src_ab, tgt_ab, args.cfg, args.optimizer.cfg,
                                args.doubling_factor, args.seed);

  std::ostringstream log;
  log << "step\theld_out_accuracy\n";
  for (const auto& [step, acc] : res.history) log << step << '\t' << acc << '\n';
  if (!args.log_file.empty()) write_text_file(args.log_file, log.str());

  if (!res.reached_target) {
    std::cerr << "pretraining failed to reach " << args.cfg.accuracy_target << " within "
              << args.cfg.max_steps << " steps (final accuracy " << res.accuracy << ")\n";
    return 1;
  }
  save_checkpoint(args.out_checkpoint, params, src_ab, tgt_ab);
  std::cout << "pretrained to accuracy " << res.accuracy << " in " << res.steps << " steps\n";

  RunManifest manifest("pretrain");
  manifest.set("seed", args.seed);
  manifest.set("accuracy", res.accuracy);
  manifest.set("steps", static_cast<uint64_t>(res.steps));
  manifest.add_file_digest("mapping", args.mapping_file);
  manifest.add_file_digest("checkpoint_out", args.out_checkpoint);
  manifest.write(args.out_checkpoint + ".manifest.txt");
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> real_pairs, synthetic_pairs;
  std::string mapping_file, checkpoint_in, checkpoint_out, log_file, test_pairs;
  double test_fraction = 0.2;
  bool allow_fresh = false;
  ModelFlags model;
  OptimizerFlags optimizer;
  TrainConfig cfg;
};

ParallelCorpus merge_corpora(std::vector<ParallelCorpus> parts) {
  if (parts.empty()) throw Error("no corpora to merge");
  ParallelCorpus merged = std::move(parts.front());
  for (size_t i = 1; i < parts.size(); ++i) {
    for (size_t s = 0; s < parts[i].sentence_count(); ++s) {
      auto [b, e] = parts[i].sentence_range(s);
      std::vector<WordPair> sentence(parts[i].pairs.begin() + static_cast<long>(b),
                                     parts[i].pairs.begin() + static_cast<long>(e));
      merged.append_sentence(std::move(sentence));
    }
  }
  return merged;
}

int run_train(TrainArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  warn_table_findings(table);
  auto [src_ab, tgt_ab] = build_alphabets(table);
  args.cfg.optimizer = args.optimizer.cfg;

  ModelParams<float> params;
  if (!args.checkpoint_in.empty()) {
    CheckpointMeta meta;
    params = load_checkpoint(args.checkpoint_in, &meta);
    check_alphabets(meta, src_ab, tgt_ab);
  } else if (args.allow_fresh) {
    ModelDims dims{src_ab.size(), tgt_ab.size(), args.model.embed_dim, args.model.hidden_dim,
                   args.model.num_layers};
    params = random_params<float>(dims, derive_seed(args.cfg.seed, "init"));
    std::cerr << "warning: training from random parameters (pretraining waived)\n";
  } else {
    throw Error("no --checkpoint-in given; pass --allow-fresh to waive pretraining");
  }

  std::vector<ParallelCorpus> train_corpora;
  std::vector<ParallelCorpus> test_parts;
  for (const auto& file : args.real_pairs) {
    ParallelCorpus corpus = read_pair_file(file, src_ab, tgt_ab, Origin::real);
    if (args.test_pairs.empty() && args.test_fraction > 0.0) {
      auto [train_part, test_part] =
          split_corpus(corpus, args.test_fraction, derive_seed(args.cfg.seed, "split"));
      train_corpora.push_back(std::move(train_part));
      test_parts.push_back(std::move(test_part));
    } else {
      train_corpora.push_back(std::move(corpus));
    }
  }
  for (const auto& file : args.synthetic_pairs) {
    train_corpora.push_back(read_pair_file(file, src_ab, tgt_ab, Origin::synthetic));
  }
  if (train_corpora.empty()) throw Error("no training corpora given");

  std::optional<ParallelCorpus> test_corpus;
  if (!args.test_pairs.empty()) {
    test_corpus = read_pair_file(args.test_pairs, src_ab, tgt_ab, Origin::real);
  } else if (!test_parts.empty()) {
    test_corpus = merge_corpora(std::move(test_parts));
  }

  TrainResult res =
      train(params, train_corpora, test_corpus ? &*test_corpus : nullptr, args.cfg);
  if (!args.log_file.empty()) write_text_file(args.log_file, format_log(res.log));
  save_checkpoint(args.checkpoint_out, params, src_ab, tgt_ab);

  RunManifest manifest("train");
  manifest.set("seed", args.cfg.seed);
  manifest.set("epochs", static_cast<uint64_t>(args.cfg.epochs));
  manifest.set("batch_size", static_cast<uint64_t>(args.cfg.batch_size));
  manifest.set("chunk_window", static_cast<uint64_t>(args.cfg.chunk_window));
  manifest.set("doubling_factor", static_cast<uint64_t>(args.cfg.doubling_factor));
  manifest.set("dropout_rate", args.cfg.dropout.rate);
  manifest.set("test_fraction", args.test_fraction);
  manifest.add_file_digest("mapping", args.mapping_file);
  for (const auto& f : args.real_pairs) manifest.add_file_digest("real", f);
  for (const auto& f : args.synthetic_pairs) manifest.add_file_digest("synthetic", f);
  manifest.add_file_digest("checkpoint_out", args.checkpoint_out);
  manifest.write(args.checkpoint_out + ".manifest.txt");

  if (res.diverged) {
    std::cerr << "training aborted: " << res.message << "\n";
    return 1;
  }
  if (!res.log.empty()) {
    std::cout << "trained " << res.log.size() << " epochs; final train loss "
              << res.log.back().train_loss;
    if (test_corpus) std::cout << ", test LER " << res.log.back().test_ler;
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// transliterate
// ---------------------------------------------------------------------------

struct TransliterateArgs {
  std::string checkpoint_file, mapping_file, input_file, out_file;
  std::string annotations_file, kbest_file, policy_file;
  int beam_width = 8;
  int topk = 1;
  int chunk_window = 20;
  int doubling_factor = 2;
};

int run_transliterate(const TransliterateArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  auto [src_ab, tgt_ab] = build_alphabets(table);
  CheckpointMeta meta;
  ModelParams<float> params = load_checkpoint(args.checkpoint_file, &meta);
  check_alphabets(meta, src_ab, tgt_ab);

  NormalizationPolicy policy;
  if (!args.policy_file.empty()) policy = NormalizationPolicy::load(args.policy_file);

  auto input_lines = read_sentences(args.input_file);

  // Optional annotation file: one line per input line, space-separated
  // 0-based token positions to mask.
  std::vector<std::set<size_t>> annotations(input_lines.size());
  if (!args.annotations_file.empty()) {
    auto ann_lines = read_sentences(args.annotations_file);
    if (ann_lines.size() > input_lines.size()) {
      throw Error("annotation file has more lines than the input");
    }
    for (size_t i = 0; i < ann_lines.size(); ++i) {
      for (const auto& tok : ann_lines[i]) {
        annotations[i].insert(static_cast<size_t>(std::stoul(utf8_encode(tok))));
      }
    }
  }

  int oov_warnings = 0;
  std::ofstream kbest;
  if (!args.kbest_file.empty() && args.topk > 1) {
    kbest.open(args.kbest_file, std::ios::binary | std::ios::trunc);
    if (!kbest) throw Error("cannot write " + args.kbest_file);
  }

  std::vector<std::vector<std::u32string>> out_lines;
  size_t sequence_index = 0;
  for (size_t line_no = 0; line_no < input_lines.size(); ++line_no) {
    std::vector<std::u32string> words;
    for (const auto& raw_word : input_lines[line_no]) {
      words.push_back(normalize_text(raw_word, policy));
    }
    // Annotated insertions become masks before anything else.
    std::vector<bool> masked(words.size(), false);
    for (size_t pos : annotations[line_no]) {
      if (pos >= words.size()) {
        throw Error("annotation position " + std::to_string(pos) + " out of range on line " +
                    std::to_string(line_no + 1));
      }
      masked[pos] = true;
    }
    // Tokens with out-of-alphabet graphemes fall back to the context-free map.
    std::vector<Token> model_tokens;
    std::vector<std::u32string> fallback(words.size());
    for (size_t w = 0; w < words.size(); ++w) {
      if (masked[w] || words[w] == std::u32string(1, Alphabet::kMaskChar)) {
        masked[w] = true;
        model_tokens.push_back(Token::masked());
        continue;
      }
      bool encodable = true;
      for (char32_t cp : words[w]) encodable = encodable && src_ab.find(cp).has_value();
      if (encodable) {
        model_tokens.push_back(Token::from_text(words[w], src_ab));
      } else {
        ++oov_warnings;
        fallback[w] = baseline_transliterate(words[w], table);
        model_tokens.push_back(Token::masked());
        masked[w] = true;
      }
    }

    if (words.empty()) {
      out_lines.emplace_back();
      continue;
    }
    bool all_masked = true;
    for (size_t w = 0; w < words.size(); ++w) {
      all_masked = all_masked && masked[w] && fallback[w].empty();
    }
    if (all_masked) {
      out_lines.push_back(words);  // pure mask passthrough
      continue;
    }

    auto decode_tokens = [&](const std::vector<Token>& tokens) {
      std::u32string decoded;
      for (auto [wb, we] : chunk_ranges(tokens, args.chunk_window)) {
        std::vector<SymbolId> input;
        for (size_t w = wb; w < we; ++w) {
          if (w > wb) input.push_back(src_ab.space_id());
          input.insert(input.end(), tokens[w].graphemes.begin(), tokens[w].graphemes.end());
        }
        if (args.doubling_factor >= 2) input = double_input(input, args.doubling_factor);
        auto trace = forward(params, input);
        std::vector<Hypothesis> hyps;
        if (args.beam_width > 0) {
          hyps = beam_decode(trace.log_probs, std::max(args.beam_width, args.topk),
                             std::max(args.topk, 1), Alphabet::kBlankId);
        } else {
          hyps.push_back({greedy_decode(trace.log_probs, Alphabet::kBlankId), 0.0});
        }
        if (kbest.is_open()) {
          kbest << "# sequence " << sequence_index << "\n";
          for (size_t r = 0; r < hyps.size(); ++r) {
            kbest << (r + 1) << '\t' << hyps[r].log_prob << '\t'
                  << utf8_encode(tgt_ab.decode(hyps[r].label)) << '\n';
          }
        }
        ++sequence_index;
        if (!decoded.empty()) decoded += U' ';
        decoded += tgt_ab.decode(hyps.at(0).label);
      }
      return decoded;
    };

    auto mask_output = [&](size_t w) {
      return fallback[w].empty() ? std::u32string(1, Alphabet::kMaskChar) : fallback[w];
    };

    // Whole-sequence decode keeps cross-mask context. When the predicted
    // word count drifts, decode each unmasked segment on its own instead so
    // masked positions stay where they belong.
    auto out_words = split_words(decode_tokens(model_tokens));
    if (out_words.size() == words.size()) {
      for (size_t w = 0; w < words.size(); ++w) {
        if (masked[w]) out_words[w] = mask_output(w);
      }
    } else {
      out_words.assign(words.size(), U"");
      for (size_t w = 0; w < words.size();) {
        if (masked[w]) {
          out_words[w] = mask_output(w);
          ++w;
          continue;
        }
        size_t end = w;
        while (end < words.size() && !masked[end]) ++end;
        std::vector<Token> segment(model_tokens.begin() + static_cast<long>(w),
                                   model_tokens.begin() + static_cast<long>(end));
        auto seg_words = split_words(decode_tokens(segment));
        if (seg_words.size() == end - w) {
          for (size_t k = 0; k < seg_words.size(); ++k) out_words[w + k] = seg_words[k];
        } else {
          // Even the segment drifted; emit its text as-is at the first slot.
          std::u32string joined;
          for (size_t k = 0; k < seg_words.size(); ++k) {
            if (k) joined += U' ';
            joined += seg_words[k];
          }
          out_words[w] = joined;
          ++oov_warnings;
        }
        w = end;
      }
      // Drop the empty slots of collapsed segments.
      std::vector<std::u32string> compact;
      for (auto& word : out_words) {
        if (!word.empty()) compact.push_back(std::move(word));
      }
      out_words = std::move(compact);
    }
    out_lines.push_back(std::move(out_words));
  }

  write_sentences(args.out_file, out_lines);
  if (oov_warnings > 0) {
    std::cerr << "warning: " << oov_warnings
              << " tokens fell back to the context-free mapping or could not be spliced\n";
  }

  RunManifest manifest("transliterate");
  manifest.add_file_digest("checkpoint", args.checkpoint_file);
  manifest.add_file_digest("input", args.input_file);
  manifest.add_file_digest("output", args.out_file);
  manifest.set("beam_width", static_cast<uint64_t>(args.beam_width));
  manifest.set("topk", static_cast<uint64_t>(args.topk));
  manifest.set("oov_warnings", static_cast<uint64_t>(oov_warnings));
  manifest.write(args.out_file + ".manifest.txt");
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint_file, mapping_file, pairs_file, report_file;
  int64_t shuffle_seed = -1;  // <0: no shuffling
  int beam_width = 8;
  int topk = 0;
  int chunk_window = 20;
  int doubling_factor = 2;
};

int run_evaluate(const EvaluateArgs& args) {
  MappingTable table = MappingTable::load(args.mapping_file);
  auto [src_ab, tgt_ab] = build_alphabets(table);
  CheckpointMeta meta;
  ModelParams<float> params = load_checkpoint(args.checkpoint_file, &meta);
  check_alphabets(meta, src_ab, tgt_ab);

  ParallelCorpus corpus = read_pair_file(args.pairs_file, src_ab, tgt_ab, Origin::real);
  if (args.shuffle_seed >= 0) {
    corpus = shuffle_words(corpus, static_cast<uint64_t>(args.shuffle_seed));
  }

  EvalOptions options;
  options.chunk_window = args.chunk_window;
  options.doubling_factor = args.doubling_factor;
  options.beam_width = args.topk > 0 ? std::max(args.beam_width, args.topk) : 0;
  options.topk = args.topk;
  ModelEvalResult result = evaluate_model(params, corpus, options);

  std::cout << "LER " << result.report.ler;
  if (result.report.word_ler) std::cout << " (per-word " << *result.report.word_ler << ")";
  std::cout << ", mean loss " << result.mean_loss;
  if (result.report.topk_hit_rate) {
    std::cout << ", top-" << args.topk << " hit rate " << *result.report.topk_hit_rate;
  }
  std::cout << " over " << result.report.evaluated << " sequences\n";
  if (!args.report_file.empty()) {
    write_report(args.report_file, result.report);
    RunManifest manifest("evaluate");
    manifest.add_file_digest("checkpoint", args.checkpoint_file);
    manifest.add_file_digest("pairs", args.pairs_file);
    manifest.add_file_digest("report", args.report_file);
    if (args.shuffle_seed >= 0) {
      manifest.set("shuffle_seed", static_cast<uint64_t>(args.shuffle_seed));
    }
    manifest.write(args.report_file + ".manifest.txt");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// smoke
// ---------------------------------------------------------------------------

struct SmokeArgs {
  std::string workdir;
  std::string data_dir = "data/toy";
  std::string from_stage = "synth";
  std::string to_stage = "evaluate";
  uint64_t seed = 1;
};

const std::vector<std::string> kSmokeStages = {"synth", "align", "pretrain", "train",
                                               "evaluate"};

int stage_index(const std::string& name) {
  for (size_t i = 0; i < kSmokeStages.size(); ++i) {
    if (kSmokeStages[i] == name) return static_cast<int>(i);
  }
  throw Error("unknown smoke stage '" + name + "'");
}

// End-to-end pipeline over the bundled toy corpus, asserting the desk-scale
// quality bars at each stage. Any failure names its stage and exits nonzero.
int run_smoke(const SmokeArgs& args) {
  fs::path work(args.workdir);
  fs::create_directories(work);
  fs::path data(args.data_dir);
  fs::path mapping = data / "map.tsv";
  fs::path toy_target = data / "target.txt";

  int from = stage_index(args.from_stage);
  int to = stage_index(args.to_stage);
  if (from > to) throw Error("smoke: --from-stage after --to-stage");

  std::string stage = "setup";
  try {
    if (!fs::exists(mapping) || !fs::exists(toy_target)) {
      throw Error("toy data not found under " + data.string() +
                  " (expected map.tsv and target.txt)");
    }

    stage = "synth";
    if (from <= 0 && to >= 0) {
      SynthArgs synth;
      synth.target_file = toy_target.string();
      synth.mapping_file = mapping.string();
      synth.out_pairs = (work / "synth_pairs.tsv").string();
      synth.out_source_text = (work / "synth_source.txt").string();
      synth.out_target_text = (work / "synth_target.txt").string();
      if (run_synth(synth) != 0) throw Error("synth failed");

      // Baseline round trip: on this corpus the context-free map must be
      // wrong exactly where the ambiguous letter hides, never elsewhere.
      MappingTable table = MappingTable::load(mapping.string());
      auto src_lines = read_sentences(synth.out_source_text);
      auto tgt_lines = read_sentences(synth.out_target_text);
      size_t words = 0, wrong = 0, ambiguous = 0;
      for (size_t l = 0; l < src_lines.size(); ++l) {
        for (size_t w = 0; w < src_lines[l].size(); ++w) {
          ++words;
          bool has_q = tgt_lines[l][w].find(U'Q') != std::u32string::npos;
          ambiguous += has_q ? 1 : 0;
          wrong += baseline_transliterate(src_lines[l][w], table) != tgt_lines[l][w] ? 1 : 0;
        }
      }
      if (wrong != ambiguous) {
        throw Error("baseline round trip: " + std::to_string(wrong) + " mismatches, expected " +
                    std::to_string(ambiguous) + " (the ambiguous words)");
      }
    }

    stage = "align";
    if (from <= 1 && to >= 1) {
      AlignArgs al;
      al.source_file = (work / "synth_source.txt").string();
      al.target_file = (work / "synth_target.txt").string();
      al.mapping_file = mapping.string();
      al.out_pairs = (work / "aligned_pairs.tsv").string();
      al.out_report = (work / "align_report.txt").string();
      if (run_align(al) != 0) throw Error("align failed");
    }

    stage = "pretrain";
    if (from <= 2 && to >= 2) {
      PretrainArgs pre;
      pre.mapping_file = mapping.string();
      pre.out_checkpoint = (work / "pretrained.ckpt").string();
      pre.log_file = (work / "pretrain.log").string();
      pre.model.embed_dim = 4;
      pre.model.hidden_dim = 32;
      pre.model.num_layers = 2;
      pre.cfg.batch_size = 16;
      pre.cfg.max_steps = 2000;
      pre.optimizer.cfg.learning_rate = 3e-3;
      pre.seed = args.seed;
      if (run_pretrain(pre) != 0) throw Error("pretraining missed its accuracy target");
    }

    stage = "train";
    if (from <= 3 && to >= 3) {
      TrainArgs tr;
      tr.mapping_file = mapping.string();
      tr.checkpoint_in = (work / "pretrained.ckpt").string();
      tr.checkpoint_out = (work / "model.ckpt").string();
      tr.log_file = (work / "train.log").string();
      tr.real_pairs = {(work / "aligned_pairs.tsv").string()};
      tr.synthetic_pairs = {(work / "synth_pairs.tsv").string()};
      tr.test_fraction = 0.2;
      tr.cfg.batch_size = 16;
      tr.cfg.chunk_window = 20;
      tr.cfg.epochs = 30;
      tr.cfg.seed = args.seed;
      tr.cfg.dropout.rate = 0.0;
      tr.optimizer.cfg.learning_rate = 3e-3;
      if (run_train(tr) != 0) throw Error("training failed");
    }

    stage = "evaluate";
    if (from <= 4 && to >= 4) {
      EvaluateArgs ev;
      ev.checkpoint_file = (work / "model.ckpt").string();
      ev.mapping_file = mapping.string();
      ev.pairs_file = (work / "aligned_pairs.tsv").string();
      ev.report_file = (work / "eval_report.tsv").string();
      ev.topk = 5;
      if (run_evaluate(ev) != 0) throw Error("evaluation failed");

      // Quality bars: the model beats the context-free baseline, which is
      // stuck at the ambiguity rate.
      MappingTable table = MappingTable::load(mapping.string());
      auto [src_ab, tgt_ab] = build_alphabets(table);
      ModelParams<float> params = load_checkpoint(ev.checkpoint_file);
      ParallelCorpus corpus = read_pair_file(ev.pairs_file, src_ab, tgt_ab, Origin::real);
      EvalOptions options;
      ModelEvalResult model_eval = evaluate_model(params, corpus, options);

      std::vector<std::u32string> base_preds, truths;
      for (const auto& pair : corpus.pairs) {
        base_preds.push_back(
            baseline_transliterate(pair.source.text(src_ab), table));
        truths.push_back(pair.target.text(tgt_ab));
      }
      double baseline_ler = label_error_rate(base_preds, truths).ler;
      std::cout << "smoke: model LER " << model_eval.report.ler << ", baseline LER "
                << baseline_ler << "\n";
      if (model_eval.report.ler > 0.02) {
        throw Error("model LER " + std::to_string(model_eval.report.ler) + " above 0.02");
      }
      if (model_eval.report.ler >= baseline_ler) {
        throw Error("model did not beat the context-free baseline");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "smoke: stage " << stage << " failed: " << e.what() << "\n";
    return 1;
  }
  std::cout << "smoke: all stages passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"character-level transliteration toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "flat key=value config file; subcommand options appear as "
                 "<subcommand>.<option>");

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "word-align two parallel texts");
  align_cmd->add_option("--source", align_args.source_file, "source-script text")->required();
  align_cmd->add_option("--target", align_args.target_file, "target-script text")->required();
  align_cmd->add_option("--mapping", align_args.mapping_file, "mapping table")->required();
  align_cmd->add_option("--threshold", align_args.threshold, "similarity keep threshold");
  align_cmd->add_option("--out", align_args.out_pairs, "pair file to write")->required();
  align_cmd->add_option("--report", align_args.out_report, "alignment report path");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate pseudo-parallel data");
  synth_cmd->add_option("--target", synth_args.target_file, "target-script text")->required();
  synth_cmd->add_option("--mapping", synth_args.mapping_file, "mapping table")->required();
  synth_cmd->add_option("--normalize", synth_args.policy_file, "normalization policy file");
  synth_cmd->add_option("--out", synth_args.out_pairs, "pair file to write")->required();
  synth_cmd->add_option("--out-source", synth_args.out_source_text, "also write source text");
  synth_cmd->add_option("--out-target", synth_args.out_target_text,
                        "also write normalized target text");

  BaselineArgs baseline_args;
  auto* baseline_cmd = app.add_subcommand("baseline", "context-free transliteration");
  baseline_cmd->add_option("--input", baseline_args.input_file, "source text")->required();
  baseline_cmd->add_option("--mapping", baseline_args.mapping_file, "mapping table")
      ->required();
  baseline_cmd->add_option("--out", baseline_args.out_file, "output text")->required();
  baseline_cmd->add_option("--reference", baseline_args.reference_file,
                           "reference target text for LER");
  baseline_cmd->add_option("--report", baseline_args.report_file, "evaluation report path");
  baseline_cmd->add_flag("--strict", baseline_args.strict, "reject unmapped graphemes");

  PretrainArgs pretrain_args;
  auto* pretrain_cmd = app.add_subcommand("pretrain", "single-letter cross-entropy stage");
  pretrain_cmd->add_option("--mapping", pretrain_args.mapping_file, "mapping table")
      ->required();
  pretrain_cmd->add_option("--out", pretrain_args.out_checkpoint, "checkpoint to write")
      ->required();
  pretrain_cmd->add_option("--log", pretrain_args.log_file, "accuracy log path");
  pretrain_args.model.attach(pretrain_cmd);
  pretrain_args.optimizer.attach(pretrain_cmd);
  pretrain_cmd->add_option("--sequence-length", pretrain_args.cfg.sequence_length,
                           "random sequence length");
  pretrain_cmd->add_option("--batch-size", pretrain_args.cfg.batch_size, "batch size");
  pretrain_cmd->add_option("--max-steps", pretrain_args.cfg.max_steps, "step budget");
  pretrain_cmd->add_option("--accuracy-target", pretrain_args.cfg.accuracy_target,
                           "held-out frame accuracy to reach");
  pretrain_cmd->add_option("--doubling", pretrain_args.doubling_factor, "input doubling factor");
  pretrain_cmd->add_option("--seed", pretrain_args.seed, "root seed");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "CTC training over chunked corpora");
  train_cmd->add_option("--real", train_args.real_pairs, "real pair file (repeatable)");
  train_cmd->add_option("--synthetic", train_args.synthetic_pairs,
                        "synthetic pair file (repeatable)");
  train_cmd->add_option("--mapping", train_args.mapping_file, "mapping table")->required();
  train_cmd->add_option("--checkpoint-in", train_args.checkpoint_in, "pretrained checkpoint");
  train_cmd->add_option("--checkpoint-out", train_args.checkpoint_out, "checkpoint to write")
      ->required();
  train_cmd->add_option("--log", train_args.log_file, "per-epoch log path");
  train_cmd->add_option("--test-pairs", train_args.test_pairs, "explicit test pair file");
  train_cmd->add_option("--test-fraction", train_args.test_fraction,
                        "random test split fraction");
  train_cmd->add_flag("--allow-fresh", train_args.allow_fresh,
                      "waive pretraining and start from random parameters");
  train_args.model.attach(train_cmd);
  train_args.optimizer.attach(train_cmd);
  train_cmd->add_option("--batch-size", train_args.cfg.batch_size, "batch size");
  train_cmd->add_option("--chunk-window", train_args.cfg.chunk_window,
                        "training sequence window, characters");
  train_cmd->add_option("--doubling", train_args.cfg.doubling_factor,
                        "input doubling factor (1 disables)");
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  train_cmd->add_option("--dropout-rate", train_args.cfg.dropout.rate,
                        "input symbol dropout rate");
  train_cmd->add_flag("--dropout-on-real", train_args.cfg.dropout.apply_to_real,
                      "apply dropout to real corpora too");
  train_cmd
      ->add_flag("!--no-dropout-on-synthetic", train_args.cfg.dropout.apply_to_synthetic,
                 "disable dropout on synthetic corpora")
      ->default_val(true);
  train_cmd
      ->add_flag("!--no-shuffle", train_args.cfg.shuffle_between_epochs,
                 "disable reshuffling between epochs")
      ->default_val(true);
  train_cmd->add_option("--seed", train_args.cfg.seed, "root seed");
  train_cmd->add_option("--threads", train_args.cfg.threads,
                        "data-parallel gradient workers");

  TransliterateArgs translit_args;
  auto* translit_cmd = app.add_subcommand("transliterate", "run a trained model on text");
  translit_cmd->add_option("--checkpoint", translit_args.checkpoint_file, "model checkpoint")
      ->required();
  translit_cmd->add_option("--mapping", translit_args.mapping_file, "mapping table")
      ->required();
  translit_cmd->add_option("--input", translit_args.input_file, "source text")->required();
  translit_cmd->add_option("--out", translit_args.out_file, "output text")->required();
  translit_cmd->add_option("--annotations", translit_args.annotations_file,
                           "per-line mask positions");
  translit_cmd->add_option("--normalize", translit_args.policy_file,
                           "source normalization policy");
  translit_cmd->add_option("--kbest", translit_args.kbest_file, "k-best sidecar path");
  translit_cmd->add_option("--beam-width", translit_args.beam_width, "beam width (0: greedy)");
  translit_cmd->add_option("--topk", translit_args.topk, "hypotheses per sequence");
  translit_cmd->add_option("--chunk-window", translit_args.chunk_window, "sequence window");
  translit_cmd->add_option("--doubling", translit_args.doubling_factor, "doubling factor");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a model against a pair file");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint_file, "model checkpoint")
      ->required();
  eval_cmd->add_option("--mapping", eval_args.mapping_file, "mapping table")->required();
  eval_cmd->add_option("--pairs", eval_args.pairs_file, "test pair file")->required();
  eval_cmd->add_option("--report", eval_args.report_file, "report path");
  eval_cmd->add_option("--shuffle-seed", eval_args.shuffle_seed,
                       "shuffle word pairs with this seed before scoring");
  eval_cmd->add_option("--beam-width", eval_args.beam_width, "beam width for top-k");
  eval_cmd->add_option("--topk", eval_args.topk, "top-k hit analysis (0: off)");
  eval_cmd->add_option("--chunk-window", eval_args.chunk_window, "sequence window");
  eval_cmd->add_option("--doubling", eval_args.doubling_factor, "doubling factor");

  SmokeArgs smoke_args;
  auto* smoke_cmd = app.add_subcommand("smoke", "end-to-end pipeline on the bundled toy set");
  smoke_cmd->add_option("--workdir", smoke_args.workdir, "working directory")->required();
  smoke_cmd->add_option("--data", smoke_args.data_dir, "toy data directory");
  smoke_cmd->add_option("--from-stage", smoke_args.from_stage,
                        "first stage (synth|align|pretrain|train|evaluate)");
  smoke_cmd->add_option("--to-stage", smoke_args.to_stage, "last stage");
  smoke_cmd->add_option("--seed", smoke_args.seed, "root seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (align_cmd->parsed()) return run_align(align_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (baseline_cmd->parsed()) return run_baseline(baseline_args);
    if (pretrain_cmd->parsed()) return run_pretrain(pretrain_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (translit_cmd->parsed()) return run_transliterate(translit_args);
    if (eval_cmd->parsed()) return run_evaluate(eval_args);
    if (smoke_cmd->parsed()) return run_smoke(smoke_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
