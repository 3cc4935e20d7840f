#pragma once

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "translit/alphabet.hpp"
#include "translit/error.hpp"

namespace translit {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

struct ModelDims {
  int source_vocab = 0;
  int target_vocab = 0;
  int embed_dim = 8;
  int hidden_dim = 1024;
  int num_layers = 4;
};

// One gated recurrent cell. Gate matrices act on the concatenation [x, h]
// (and [x, r*h] for the candidate), biases are column vectors.
template <class S>
struct GruCell {
  Mat<S> w_update, w_reset, w_candidate;  // (input_dim + hidden) x hidden
  Mat<S> b_update, b_reset, b_candidate;  // hidden x 1
  int input_dim = 0;
  int hidden_dim = 0;
};

template <class S>
struct GruLayer {
  GruCell<S> cells[2];  // [0] runs forward in time, [1] backward
};

// Everything learnable: letter embeddings, the stacked bidirectional
// recurrent layers, and the output projection. With zero layers the
// projection reads the embeddings directly (useful for sanity checks).
template <class S>
struct ModelParams {
  Mat<S> embedding;        // source_vocab x embed_dim
  std::vector<GruLayer<S>> layers;
  Mat<S> projection;       // feature_dim x target_vocab
  Mat<S> projection_bias;  // target_vocab x 1

  int source_vocab() const { return static_cast<int>(embedding.rows()); }
  int target_vocab() const { return static_cast<int>(projection.cols()); }
  int embed_dim() const { return static_cast<int>(embedding.cols()); }
  int num_layers() const { return static_cast<int>(layers.size()); }
  int hidden_dim() const { return layers.empty() ? 0 : layers[0].cells[0].hidden_dim; }
  int feature_dim() const { return layers.empty() ? embed_dim() : 2 * hidden_dim(); }

  ModelDims dims() const {
    return {source_vocab(), target_vocab(), embed_dim(), hidden_dim(), num_layers()};
  }

  template <class T>
  ModelParams<T> cast() const;

  bool all_finite() const;
};

namespace detail {

template <class S>
GruCell<S> make_cell(int input_dim, int hidden_dim) {
  GruCell<S> c;
  c.input_dim = input_dim;
  c.hidden_dim = hidden_dim;
  c.w_update = Mat<S>::Zero(input_dim + hidden_dim, hidden_dim);
  c.w_reset = Mat<S>::Zero(input_dim + hidden_dim, hidden_dim);
  c.w_candidate = Mat<S>::Zero(input_dim + hidden_dim, hidden_dim);
  c.b_update = Mat<S>::Zero(hidden_dim, 1);
  c.b_reset = Mat<S>::Zero(hidden_dim, 1);
  c.b_candidate = Mat<S>::Zero(hidden_dim, 1);
  return c;
}

}  // namespace detail

// Calls f(name, matrix) for every parameter block, in a fixed order shared
// by the optimizer state, checkpoints, and the gradient checks.
template <class Params, class F>
void visit_params(Params& p, F&& f) {
  f("embedding", p.embedding);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    for (int d = 0; d < 2; ++d) {
      auto& cell = p.layers[l].cells[d];
      std::string prefix = "layer" + std::to_string(l) + (d == 0 ? ".fwd." : ".bwd.");
      f(prefix + "w_update", cell.w_update);
      f(prefix + "b_update", cell.b_update);
      f(prefix + "w_reset", cell.w_reset);
      f(prefix + "b_reset", cell.b_reset);
      f(prefix + "w_candidate", cell.w_candidate);
      f(prefix + "b_candidate", cell.b_candidate);
    }
  }
  f("projection", p.projection);
  f("projection_bias", p.projection_bias);
}

template <class S>
ModelParams<S> zeros_like_params(const ModelDims& d) {
  if (d.source_vocab < 1 || d.target_vocab < 1 || d.embed_dim < 1 || d.num_layers < 0 ||
      (d.num_layers > 0 && d.hidden_dim < 1)) {
    throw Error("bad model dimensions");
  }
  ModelParams<S> p;
  p.embedding = Mat<S>::Zero(d.source_vocab, d.embed_dim);
  for (int l = 0; l < d.num_layers; ++l) {
    int input_dim = l == 0 ? d.embed_dim : 2 * d.hidden_dim;
    GruLayer<S> layer;
    layer.cells[0] = detail::make_cell<S>(input_dim, d.hidden_dim);
    layer.cells[1] = detail::make_cell<S>(input_dim, d.hidden_dim);
    p.layers.push_back(std::move(layer));
  }
  p.projection = Mat<S>::Zero(p.feature_dim(), d.target_vocab);
  p.projection_bias = Mat<S>::Zero(d.target_vocab, 1);
  return p;
}

// Seeded uniform(-k, k) with k = 1/sqrt(fan_in) per block; biases stay zero.
template <class S>
ModelParams<S> random_params(const ModelDims& d, uint64_t seed) {
  ModelParams<S> p = zeros_like_params<S>(d);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Mat<S>& w, Eigen::Index fan_in) {
    double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-k, k);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = static_cast<S>(dist(rng));
    }
  };
  fill(p.embedding, p.embedding.cols());
  for (auto& layer : p.layers) {
    for (auto& cell : layer.cells) {
      fill(cell.w_update, cell.w_update.rows());
      fill(cell.w_reset, cell.w_reset.rows());
      fill(cell.w_candidate, cell.w_candidate.rows());
    }
  }
  fill(p.projection, p.projection.rows());
  return p;
}

template <class S>
template <class T>
ModelParams<T> ModelParams<S>::cast() const {
  ModelParams<T> out = zeros_like_params<T>(dims());
  std::vector<const Mat<S>*> src;
  visit_params(const_cast<ModelParams<S>&>(*this),
               [&src](const std::string&, const Mat<S>& m) { src.push_back(&m); });
  size_t i = 0;
  visit_params(out, [&](const std::string&, Mat<T>& m) { m = src[i++]->template cast<T>(); });
  return out;
}

template <class S>
bool ModelParams<S>::all_finite() const {
  bool ok = true;
  visit_params(const_cast<ModelParams<S>&>(*this),
               [&ok](const std::string&, const Mat<S>& m) { ok = ok && m.allFinite(); });
  return ok;
}

// ---------------------------------------------------------------------------
// Forward / backward
// ---------------------------------------------------------------------------

// Per-direction activations, stored in processing order (step k of a
// backward cell is time T-1-k).
template <class S>
struct DirectionTrace {
  Mat<S> update, reset, candidate, h;  // T x hidden each
};

template <class S>
struct ForwardTrace {
  std::vector<SymbolId> input_ids;
  std::vector<Mat<S>> layer_inputs;  // [0] = embedded T x d, [l] = output of layer l-1
  std::vector<std::array<DirectionTrace<S>, 2>> layer_traces;
  Mat<S> logits;     // T x target_vocab
  Mat<S> log_probs;  // T x target_vocab, rows are log-softmax of logits
};

// One recurrent step: h' = (1-z)*h + z*hcand. Column-vector interface used
// by tests and by the sequence runner below.
template <class S>
Mat<S> gru_step(const GruCell<S>& cell, const Mat<S>& x, const Mat<S>& h) {
  if (x.rows() != cell.input_dim || x.cols() != 1 || h.rows() != cell.hidden_dim ||
      h.cols() != 1) {
    throw Error("gru_step: dimension mismatch");
  }
  Mat<S> u(cell.input_dim + cell.hidden_dim, 1);
  u << x, h;
  Mat<S> z = (cell.w_update.transpose() * u + cell.b_update).array().logistic().matrix();
  Mat<S> r = (cell.w_reset.transpose() * u + cell.b_reset).array().logistic().matrix();
  Mat<S> v(cell.input_dim + cell.hidden_dim, 1);
  v << x, (r.array() * h.array()).matrix();
  Mat<S> hc = (cell.w_candidate.transpose() * v + cell.b_candidate).array().tanh().matrix();
  return ((S(1) - z.array()) * h.array() + z.array() * hc.array()).matrix();
}

namespace detail {

// Runs one direction over the whole sequence. X is in time order; the trace
// rows are in processing order.
template <class S>
DirectionTrace<S> run_direction(const GruCell<S>& cell, const Mat<S>& x_time, bool reverse) {
  const Eigen::Index steps = x_time.rows();
  const int h_dim = cell.hidden_dim;
  DirectionTrace<S> trace;
  trace.update.resize(steps, h_dim);
  trace.reset.resize(steps, h_dim);
  trace.candidate.resize(steps, h_dim);
  trace.h.resize(steps, h_dim);

  Eigen::Matrix<S, 1, Eigen::Dynamic> h_prev = Eigen::Matrix<S, 1, Eigen::Dynamic>::Zero(h_dim);
  Eigen::Matrix<S, 1, Eigen::Dynamic> u(cell.input_dim + h_dim), v(cell.input_dim + h_dim);
  for (Eigen::Index k = 0; k < steps; ++k) {
    Eigen::Index t = reverse ? steps - 1 - k : k;
    u << x_time.row(t), h_prev;
    auto z = (u * cell.w_update + cell.b_update.transpose()).array().logistic();
    auto r = (u * cell.w_reset + cell.b_reset.transpose()).array().logistic();
    trace.update.row(k) = z.matrix();
    trace.reset.row(k) = r.matrix();
    v << x_time.row(t), (r * h_prev.array()).matrix();
    auto hc = (v * cell.w_candidate + cell.b_candidate.transpose()).array().tanh();
    trace.candidate.row(k) = hc.matrix();
    h_prev = ((S(1) - z) * h_prev.array() + z * hc).matrix();
    trace.h.row(k) = h_prev;
  }
  return trace;
}

// Backpropagation through one direction. dh_time is the gradient w.r.t. this
// direction's outputs (time order). Returns the gradient w.r.t. x_time and
// accumulates the cell's parameter gradients.
template <class S>
Mat<S> backward_direction(const GruCell<S>& cell, const Mat<S>& x_time,
                          const DirectionTrace<S>& trace, bool reverse, const Mat<S>& dh_time,
                          GruCell<S>& grad) {
  const Eigen::Index steps = x_time.rows();
  const int in_dim = cell.input_dim;
  const int h_dim = cell.hidden_dim;
  Mat<S> dx_time = Mat<S>::Zero(steps, in_dim);
  using Row = Eigen::Matrix<S, 1, Eigen::Dynamic>;
  Row dh_carry = Row::Zero(h_dim);
  Row u(in_dim + h_dim), v(in_dim + h_dim);
  for (Eigen::Index k = steps - 1; k >= 0; --k) {
    Eigen::Index t = reverse ? steps - 1 - k : k;
    Row h_prev = k == 0 ? Row::Zero(h_dim) : Row(trace.h.row(k - 1));
    Row z = trace.update.row(k);
    Row r = trace.reset.row(k);
    Row hc = trace.candidate.row(k);

    Row dh = dh_time.row(t) + dh_carry;
    Row dz = (dh.array() * (hc - h_prev).array()).matrix();
    Row dhc = (dh.array() * z.array()).matrix();
    Row dh_prev = (dh.array() * (S(1) - z.array())).matrix();

    // candidate: hc = tanh([x, r*h_prev] * Wc + bc)
    Row da_c = (dhc.array() * (S(1) - hc.array().square())).matrix();
    u << x_time.row(t), h_prev;
    v << x_time.row(t), (r.array() * h_prev.array()).matrix();
    grad.w_candidate.noalias() += v.transpose() * da_c;
    grad.b_candidate.noalias() += da_c.transpose();
    Row dv = da_c * cell.w_candidate.transpose();
    dx_time.row(t) += dv.head(in_dim);
    Row drh = dv.tail(h_dim);
    Row dr = (drh.array() * h_prev.array()).matrix();
    dh_prev += (drh.array() * r.array()).matrix();

    // reset gate: r = sigma([x, h_prev] * Wr + br)
    Row da_r = (dr.array() * r.array() * (S(1) - r.array())).matrix();
    grad.w_reset.noalias() += u.transpose() * da_r;
    grad.b_reset.noalias() += da_r.transpose();
    Row du = da_r * cell.w_reset.transpose();
    dx_time.row(t) += du.head(in_dim);
    dh_prev += du.tail(h_dim);

    // update gate: z = sigma([x, h_prev] * Wz + bz)
    Row da_z = (dz.array() * z.array() * (S(1) - z.array())).matrix();
    grad.w_update.noalias() += u.transpose() * da_z;
    grad.b_update.noalias() += da_z.transpose();
    du = da_z * cell.w_update.transpose();
    dx_time.row(t) += du.head(in_dim);
    dh_prev += du.tail(h_dim);

    dh_carry = dh_prev;
  }
  return dx_time;
}

}  // namespace detail

// Frame-synchronous forward pass: one logit row (and log-softmax row) per
// input symbol.
template <class S>
ForwardTrace<S> forward(const ModelParams<S>& params, std::span<const SymbolId> input_ids) {
  const Eigen::Index steps = static_cast<Eigen::Index>(input_ids.size());
  if (steps < 1) throw Error("forward: empty input");
  ForwardTrace<S> trace;
  trace.input_ids.assign(input_ids.begin(), input_ids.end());

  Mat<S> x(steps, params.embed_dim());
  for (Eigen::Index t = 0; t < steps; ++t) {
    SymbolId id = input_ids[static_cast<size_t>(t)];
    if (id < 0 || id >= params.source_vocab()) {
      throw Error("forward: input id out of range: " + std::to_string(id));
    }
    x.row(t) = params.embedding.row(id);
  }
  trace.layer_inputs.push_back(x);

  for (const auto& layer : params.layers) {
    const Mat<S>& in = trace.layer_inputs.back();
    std::array<DirectionTrace<S>, 2> dirs = {detail::run_direction(layer.cells[0], in, false),
                                             detail::run_direction(layer.cells[1], in, true)};
    const int h_dim = layer.cells[0].hidden_dim;
    Mat<S> out(steps, 2 * h_dim);
    for (Eigen::Index t = 0; t < steps; ++t) {
      out.row(t).head(h_dim) = dirs[0].h.row(t);
      out.row(t).tail(h_dim) = dirs[1].h.row(steps - 1 - t);
    }
    trace.layer_traces.push_back(std::move(dirs));
    trace.layer_inputs.push_back(std::move(out));
  }

  const Mat<S>& features = trace.layer_inputs.back();
  trace.logits = features * params.projection;
  trace.logits.rowwise() += params.projection_bias.transpose().row(0);

  trace.log_probs.resize(steps, params.target_vocab());
  for (Eigen::Index t = 0; t < steps; ++t) {
    S m = trace.logits.row(t).maxCoeff();
    S lse = m + std::log((trace.logits.row(t).array() - m).exp().sum());
    trace.log_probs.row(t) = trace.logits.row(t).array() - lse;
  }
  return trace;
}

// Gradients of a scalar loss w.r.t. every parameter, given the loss gradient
// w.r.t. the log-softmax outputs. Returns a ModelParams holding gradients.
template <class S>
ModelParams<S> backward(const ModelParams<S>& params, const ForwardTrace<S>& trace,
                        const Mat<S>& grad_log_probs) {
  const Eigen::Index steps = trace.log_probs.rows();
  if (grad_log_probs.rows() != steps || grad_log_probs.cols() != trace.log_probs.cols()) {
    throw Error("backward: gradient shape mismatch");
  }
  ModelParams<S> grads = zeros_like_params<S>(params.dims());

  // Through log-softmax: dlogits = g - softmax * rowsum(g).
  Mat<S> dlogits(steps, params.target_vocab());
  for (Eigen::Index t = 0; t < steps; ++t) {
    S gsum = grad_log_probs.row(t).sum();
    dlogits.row(t) =
        grad_log_probs.row(t).array() - trace.log_probs.row(t).array().exp() * gsum;
  }

  const Mat<S>& features = trace.layer_inputs.back();
  grads.projection.noalias() = features.transpose() * dlogits;
  grads.projection_bias = dlogits.colwise().sum().transpose();
  Mat<S> dfeat = dlogits * params.projection.transpose();

  for (int l = params.num_layers() - 1; l >= 0; --l) {
    const auto& layer = params.layers[static_cast<size_t>(l)];
    const auto& dirs = trace.layer_traces[static_cast<size_t>(l)];
    const Mat<S>& in = trace.layer_inputs[static_cast<size_t>(l)];
    const int h_dim = layer.cells[0].hidden_dim;

    // Split the concatenated gradient back per direction. Row t of either
    // half is the gradient w.r.t. that direction's state at time t;
    // backward_direction maps time to its own processing order.
    Mat<S> dh_fwd(steps, h_dim), dh_bwd(steps, h_dim);
    for (Eigen::Index t = 0; t < steps; ++t) {
      dh_fwd.row(t) = dfeat.row(t).head(h_dim);
      dh_bwd.row(t) = dfeat.row(t).tail(h_dim);
    }
    auto& glayer = grads.layers[static_cast<size_t>(l)];
    Mat<S> dx = detail::backward_direction(layer.cells[0], in, dirs[0], false, dh_fwd,
                                           glayer.cells[0]);
    dx += detail::backward_direction(layer.cells[1], in, dirs[1], true, dh_bwd,
                                     glayer.cells[1]);
    dfeat = std::move(dx);
  }

  for (Eigen::Index t = 0; t < steps; ++t) {
    grads.embedding.row(trace.input_ids[static_cast<size_t>(t)]) += dfeat.row(t);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// RMSprop
// ---------------------------------------------------------------------------

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double decay = 0.9;
  double epsilon = 1e-8;
  double max_grad_norm = 0;  // 0 disables clipping
};

template <class S>
struct OptimizerState {
  OptimizerConfig cfg;
  std::vector<Mat<S>> mean_square;  // one accumulator per block, visit order

  explicit OptimizerState(OptimizerConfig c = {}) : cfg(c) {}
};

// accumulator <- decay*accumulator + (1-decay)*grad^2
// param       <- param - lr * grad / sqrt(accumulator + eps)
// Steps with non-finite gradients are rejected outright.
template <class S>
void rmsprop_update(ModelParams<S>& params, const ModelParams<S>& grads,
                    OptimizerState<S>& state) {
  if (!grads.all_finite()) {
    throw Error("rmsprop_update: gradient contains NaN or Inf; step rejected");
  }
  std::vector<Mat<S>*> blocks, gblocks;
  visit_params(params, [&](const std::string&, Mat<S>& m) { blocks.push_back(&m); });
  visit_params(const_cast<ModelParams<S>&>(grads),
               [&](const std::string&, Mat<S>& m) { gblocks.push_back(&m); });
  if (state.mean_square.empty()) {
    for (Mat<S>* b : blocks) state.mean_square.push_back(Mat<S>::Zero(b->rows(), b->cols()));
  }
  if (state.mean_square.size() != blocks.size()) {
    throw Error("rmsprop_update: optimizer state does not match parameter shape");
  }

  S scale = 1;
  if (state.cfg.max_grad_norm > 0) {
    double sq = 0;
    for (Mat<S>* g : gblocks) sq += static_cast<double>(g->squaredNorm());
    double norm = std::sqrt(sq);
    if (norm > state.cfg.max_grad_norm) {
      scale = static_cast<S>(state.cfg.max_grad_norm / norm);
    }
  }

  const S lr = static_cast<S>(state.cfg.learning_rate);
  const S decay = static_cast<S>(state.cfg.decay);
  const S eps = static_cast<S>(state.cfg.epsilon);
  for (size_t i = 0; i < blocks.size(); ++i) {
    auto g = (gblocks[i]->array() * scale).eval();
    auto& acc = state.mean_square[i];
    acc = (decay * acc.array() + (S(1) - decay) * g.square()).matrix();
    blocks[i]->array() -= lr * g / (acc.array() + eps).sqrt();
  }
}

}  // namespace translit
