#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "translit/net.hpp"

namespace translit {

// Repeats every symbol `factor` times. The standard length adaptation here:
// the target side gains marks with no source counterpart, so raw inputs are
// frequently shorter than their labels and the loss below would be
// undefined. A decorating apostrophe is a symbol of its own and doubles like
// any other.
std::vector<SymbolId> double_input(std::span<const SymbolId> ids, int factor);

// The alternative adaptation: `count` filler symbols after each original
// symbol.
std::vector<SymbolId> epsilon_insert(std::span<const SymbolId> ids, int count,
                                     SymbolId epsilon);

// Minimal frame count admitting a valid alignment path: one frame per label
// symbol plus one separating blank per adjacent repeat.
int ctc_min_frames(std::span<const SymbolId> label);

template <class S>
struct CtcResult {
  S loss;       // negative log likelihood of the label
  Mat<S> grad;  // d loss / d log_probs, same shape as log_probs
};

// Forward-backward over the blank-extended label, entirely in log space.
// log_probs is T x V of per-frame log scores (log-softmax rows in training;
// the loss itself is defined for any finite values). Throws Error when no
// valid path exists or the label contains the blank.
template <class S>
CtcResult<S> ctc_loss(const Mat<S>& log_probs, std::span<const SymbolId> label,
                      SymbolId blank);

// Per-frame argmax, collapse adjacent repeats, drop blanks.
template <class S>
std::vector<SymbolId> greedy_decode(const Mat<S>& log_probs, SymbolId blank);

struct Hypothesis {
  std::vector<SymbolId> label;
  double log_prob;  // alignment-summed over every path merged into the label
};

// Prefix beam search with merging of identical collapsed prefixes. With a
// beam wide enough to hold every distinct labeling of a tiny instance this
// is exact.
template <class S>
std::vector<Hypothesis> beam_decode(const Mat<S>& log_probs, int beam_width, int k,
                                    SymbolId blank);

// ---------------------------------------------------------------------------
// Implementation
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
constexpr S neg_inf() {
  return -std::numeric_limits<S>::infinity();
}

template <class S>
S logaddexp(S a, S b) {
  if (a == neg_inf<S>()) return b;
  if (b == neg_inf<S>()) return a;
  S m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace detail

inline std::vector<SymbolId> double_input(std::span<const SymbolId> ids, int factor) {
  if (factor < 2) throw Error("double_input: factor must be >= 2");
  std::vector<SymbolId> out;
  out.reserve(ids.size() * static_cast<size_t>(factor));
  for (SymbolId id : ids) {
    for (int i = 0; i < factor; ++i) out.push_back(id);
  }
  return out;
}

inline std::vector<SymbolId> epsilon_insert(std::span<const SymbolId> ids, int count,
                                            SymbolId epsilon) {
  if (count < 1) throw Error("epsilon_insert: count must be >= 1");
  std::vector<SymbolId> out;
  out.reserve(ids.size() * static_cast<size_t>(count + 1));
  for (SymbolId id : ids) {
    out.push_back(id);
    for (int i = 0; i < count; ++i) out.push_back(epsilon);
  }
  return out;
}

inline int ctc_min_frames(std::span<const SymbolId> label) {
  int frames = static_cast<int>(label.size());
  for (size_t i = 1; i < label.size(); ++i) {
    if (label[i] == label[i - 1]) ++frames;
  }
  return frames;
}

template <class S>
CtcResult<S> ctc_loss(const Mat<S>& log_probs, std::span<const SymbolId> label,
                      SymbolId blank) {
  const Eigen::Index frames = log_probs.rows();
  const Eigen::Index vocab = log_probs.cols();
  const S kInf = detail::neg_inf<S>();
  for (SymbolId c : label) {
    if (c == blank) throw Error("ctc_loss: label contains the blank symbol");
    if (c < 0 || c >= vocab) throw Error("ctc_loss: label symbol out of range");
  }
  if (frames < ctc_min_frames(label)) {
    throw Error("ctc_loss: undefined instance: label of length " +
                std::to_string(label.size()) + " needs at least " +
                std::to_string(ctc_min_frames(label)) + " frames, got " +
                std::to_string(frames));
  }

  // Blank-extended label: blank at even positions, label symbols at odd.
  const Eigen::Index ext = 2 * static_cast<Eigen::Index>(label.size()) + 1;
  auto ext_sym = [&](Eigen::Index s) -> SymbolId {
    return s % 2 == 0 ? blank : label[static_cast<size_t>((s - 1) / 2)];
  };
  auto can_hop = [&](Eigen::Index s) {
    // A path may jump s-2 -> s when s is a symbol differing from s-2.
    return s % 2 == 1 && s >= 2 && ext_sym(s) != ext_sym(s - 2);
  };

  Mat<S> alpha = Mat<S>::Constant(frames, ext, kInf);
  alpha(0, 0) = log_probs(0, blank);
  if (ext > 1) alpha(0, 1) = log_probs(0, ext_sym(1));
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (Eigen::Index s = 0; s < ext; ++s) {
      S a = alpha(t - 1, s);
      if (s >= 1) a = detail::logaddexp(a, alpha(t - 1, s - 1));
      if (can_hop(s)) a = detail::logaddexp(a, alpha(t - 1, s - 2));
      alpha(t, s) = a == kInf ? kInf : a + log_probs(t, ext_sym(s));
    }
  }
  S log_p = alpha(frames - 1, ext - 1);
  if (ext > 1) log_p = detail::logaddexp(log_p, alpha(frames - 1, ext - 2));

  Mat<S> beta = Mat<S>::Constant(frames, ext, kInf);
  beta(frames - 1, ext - 1) = log_probs(frames - 1, ext_sym(ext - 1));
  if (ext > 1) beta(frames - 1, ext - 2) = log_probs(frames - 1, ext_sym(ext - 2));
  for (Eigen::Index t = frames - 2; t >= 0; --t) {
    for (Eigen::Index s = ext - 1; s >= 0; --s) {
      S b = beta(t + 1, s);
      if (s + 1 < ext) b = detail::logaddexp(b, beta(t + 1, s + 1));
      if (s + 2 < ext && can_hop(s + 2)) b = detail::logaddexp(b, beta(t + 1, s + 2));
      beta(t, s) = b == kInf ? kInf : b + log_probs(t, ext_sym(s));
    }
  }

  CtcResult<S> result;
  result.loss = -log_p;
  result.grad = Mat<S>::Zero(frames, vocab);
  // d(-log p)/d lp(t,k) = -exp(logsumexp_{s: sym(s)=k} alpha+beta-lp - log p)
  for (Eigen::Index t = 0; t < frames; ++t) {
    std::vector<S> acc(static_cast<size_t>(vocab), kInf);
    for (Eigen::Index s = 0; s < ext; ++s) {
      if (alpha(t, s) == kInf || beta(t, s) == kInf) continue;
      SymbolId k = ext_sym(s);
      S g = alpha(t, s) + beta(t, s) - log_probs(t, k);
      acc[static_cast<size_t>(k)] = detail::logaddexp(acc[static_cast<size_t>(k)], g);
    }
    for (Eigen::Index k = 0; k < vocab; ++k) {
      if (acc[static_cast<size_t>(k)] != kInf) {
        result.grad(t, k) = -std::exp(acc[static_cast<size_t>(k)] - log_p);
      }
    }
  }
  return result;
}

template <class S>
std::vector<SymbolId> greedy_decode(const Mat<S>& log_probs, SymbolId blank) {
  std::vector<SymbolId> out;
  SymbolId prev = -1;
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    Eigen::Index best = 0;
    log_probs.row(t).maxCoeff(&best);
    SymbolId sym = static_cast<SymbolId>(best);
    if (sym != prev && sym != blank) out.push_back(sym);
    prev = sym;
  }
  return out;
}

template <class S>
std::vector<Hypothesis> beam_decode(const Mat<S>& log_probs, int beam_width, int k,
                                    SymbolId blank) {
  if (k < 1 || beam_width < k) throw Error("beam_decode: need beam_width >= k >= 1");
  const double kInf = detail::neg_inf<double>();
  struct Entry {
    double blank_end = detail::neg_inf<double>();   // paths ending in blank
    double symbol_end = detail::neg_inf<double>();  // paths ending in the last symbol
    double total() const { return detail::logaddexp(blank_end, symbol_end); }
  };
  using Beams = std::map<std::vector<SymbolId>, Entry>;
  Beams beams;
  beams[{}].blank_end = 0.0;

  auto better = [](const std::pair<std::vector<SymbolId>, Entry>& a,
                   const std::pair<std::vector<SymbolId>, Entry>& b) {
    double ta = a.second.total(), tb = b.second.total();
    if (ta != tb) return ta > tb;
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  };

  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    Beams next;
    for (const auto& [prefix, e] : beams) {
      double total = e.total();
      Entry& same = next[prefix];
      same.blank_end =
          detail::logaddexp(same.blank_end, total + static_cast<double>(log_probs(t, blank)));
      for (Eigen::Index c = 0; c < log_probs.cols(); ++c) {
        if (static_cast<SymbolId>(c) == blank) continue;
        double p = static_cast<double>(log_probs(t, c));
        if (!prefix.empty() && prefix.back() == static_cast<SymbolId>(c)) {
          // Repeating the last symbol without a blank stays the same prefix;
          // extending requires the previous path to end in a blank.
          same.symbol_end = detail::logaddexp(same.symbol_end, e.symbol_end + p);
          auto ext = prefix;
          ext.push_back(static_cast<SymbolId>(c));
          Entry& x = next[ext];
          x.symbol_end = detail::logaddexp(x.symbol_end, e.blank_end + p);
        } else {
          auto ext = prefix;
          ext.push_back(static_cast<SymbolId>(c));
          Entry& x = next[ext];
          x.symbol_end = detail::logaddexp(x.symbol_end, total + p);
        }
      }
    }
    std::vector<std::pair<std::vector<SymbolId>, Entry>> ranked(next.begin(), next.end());
    std::sort(ranked.begin(), ranked.end(), better);
    if (ranked.size() > static_cast<size_t>(beam_width)) {
      ranked.resize(static_cast<size_t>(beam_width));
    }
    beams.clear();
    for (auto& [prefix, e] : ranked) beams.emplace(std::move(prefix), e);
    if (beams.empty()) beams[{}].blank_end = kInf;
  }

  std::vector<std::pair<std::vector<SymbolId>, Entry>> ranked(beams.begin(), beams.end());
  std::sort(ranked.begin(), ranked.end(), better);
  std::vector<Hypothesis> hyps;
  for (const auto& [prefix, e] : ranked) {
    if (hyps.size() == static_cast<size_t>(k)) break;
    hyps.push_back({prefix, e.total()});
  }
  return hyps;
}

}  // namespace translit
