#include "translit/ctc.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace translit;

namespace {

// Rows are log-softmax of random logits, so each row sums to one.
template <class S>
Mat<S> random_log_probs(int frames, int vocab, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Mat<S> lp(frames, vocab);
  for (int t = 0; t < frames; ++t) {
    double m = -1e30;
    std::vector<double> row(static_cast<size_t>(vocab));
    for (int v = 0; v < vocab; ++v) {
      row[static_cast<size_t>(v)] = dist(rng);
      m = std::max(m, row[static_cast<size_t>(v)]);
    }
    double lse = 0;
    for (double x : row) lse += std::exp(x - m);
    lse = m + std::log(lse);
    for (int v = 0; v < vocab; ++v) lp(t, v) = static_cast<S>(row[static_cast<size_t>(v)] - lse);
  }
  return lp;
}

Mat<double> uniform_two_frames() {
  Mat<double> lp(2, 2);
  lp.setConstant(std::log(0.5));
  return lp;
}

}  // namespace

TEST_CASE("double_input repeats every symbol") {
  std::vector<SymbolId> ids = {4, 7};
  CHECK(double_input(ids, 2) == std::vector<SymbolId>{4, 4, 7, 7});
  CHECK(double_input(ids, 3) == std::vector<SymbolId>{4, 4, 4, 7, 7, 7});
  CHECK(double_input(std::vector<SymbolId>{}, 2).empty());
  CHECK_THROWS_AS(double_input(ids, 1), Error);
}

TEST_CASE("double_input treats a decorating apostrophe as its own symbol") {
  // letter g followed by the apostrophe symbol; both double independently
  std::vector<SymbolId> ids = {5, 9};
  CHECK(double_input(ids, 2) == std::vector<SymbolId>{5, 5, 9, 9});
}

TEST_CASE("epsilon_insert pads after each symbol") {
  std::vector<SymbolId> ids = {4, 7};
  SymbolId eps = Alphabet::kEpsilonId;
  CHECK(epsilon_insert(ids, 1, eps) == std::vector<SymbolId>{4, eps, 7, eps});
  CHECK(epsilon_insert(std::vector<SymbolId>{}, 3, eps).empty());
  CHECK(epsilon_insert(ids, 2, eps).size() == 6);
  CHECK_THROWS_AS(epsilon_insert(ids, 0, eps), Error);
}

TEST_CASE("ctc_min_frames counts repeats") {
  CHECK(ctc_min_frames(std::vector<SymbolId>{}) == 0);
  CHECK(ctc_min_frames(std::vector<SymbolId>{1, 2, 3}) == 3);
  CHECK(ctc_min_frames(std::vector<SymbolId>{1, 1}) == 3);
  CHECK(ctc_min_frames(std::vector<SymbolId>{1, 1, 1}) == 5);
}

TEST_CASE("ctc_loss on the two-frame uniform instance") {
  Mat<double> lp = uniform_two_frames();
  SymbolId blank = 0;

  // label "a": paths {aa, a-, -a} each 1/4
  auto res = ctc_loss(lp, std::vector<SymbolId>{1}, blank);
  CHECK(res.loss == doctest::Approx(-std::log(0.75)).epsilon(1e-12));

  // empty label: single path --
  auto res_empty = ctc_loss(lp, std::vector<SymbolId>{}, blank);
  CHECK(res_empty.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // "aa" needs a separating blank: minimum three frames
  CHECK_THROWS_AS(ctc_loss(lp, std::vector<SymbolId>{1, 1}, blank), Error);
}

TEST_CASE("ctc_loss rejects labels containing the blank") {
  Mat<double> lp = uniform_two_frames();
  CHECK_THROWS_AS(ctc_loss(lp, std::vector<SymbolId>{0}, 0), Error);
}

TEST_CASE("ctc_loss matches brute-force path enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> frames_dist(1, 6), vocab_dist(2, 4), label_dist(0, 3);
  int checked = 0;
  for (int iter = 0; iter < 300; ++iter) {
    int frames = frames_dist(rng);
    int vocab = vocab_dist(rng);
    Mat<double> lp = random_log_probs<double>(frames, vocab, rng);
    int label_len = label_dist(rng);
    std::vector<SymbolId> label;
    std::uniform_int_distribution<SymbolId> sym(1, vocab - 1);
    for (int u = 0; u < label_len; ++u) label.push_back(sym(rng));
    if (frames < ctc_min_frames(label)) {
      CHECK_THROWS_AS(ctc_loss(lp, label, 0), Error);
      continue;
    }
    auto res = ctc_loss(lp, label, 0);
    double expected = oracles::ctc_brute_force(lp, label, 0);
    CHECK(std::exp(-res.loss) == doctest::Approx(expected).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("ctc_loss normalizes over all labelings") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 20; ++iter) {
    int frames = 1 + static_cast<int>(rng() % 4);
    int vocab = 2 + static_cast<int>(rng() % 2);
    Mat<double> lp = random_log_probs<double>(frames, vocab, rng);
    double total = 0.0;
    for (const auto& label : oracles::all_labelings(lp, 0)) {
      total += std::exp(-ctc_loss(lp, label, 0).loss);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("ctc_loss gradient matches central finite differences") {
  std::mt19937_64 rng(11);
  Mat<double> lp = random_log_probs<double>(5, 4, rng);
  std::vector<SymbolId> label = {2, 1, 1};
  auto res = ctc_loss(lp, label, 0);
  double worst = oracles::finite_difference_check<double>(
      lp, [&] { return ctc_loss(lp, label, 0).loss; }, res.grad);
  CHECK(worst < 1e-5);
}

TEST_CASE("greedy_decode collapses repeats then removes blanks") {
  auto frame = [](int vocab, SymbolId argmax) {
    Mat<double> row(1, vocab);
    row.setConstant(std::log(0.1));
    row(0, argmax) = std::log(0.7);
    return row;
  };
  auto stack = [&](std::vector<SymbolId> argmaxes) {
    Mat<double> lp(static_cast<Eigen::Index>(argmaxes.size()), 3);
    for (size_t t = 0; t < argmaxes.size(); ++t) lp.row(static_cast<Eigen::Index>(t)) = frame(3, argmaxes[t]);
    return lp;
  };
  CHECK(greedy_decode(stack({0, 1, 1, 0, 2}), 0) == std::vector<SymbolId>{1, 2});
  CHECK(greedy_decode(stack({0, 0, 0}), 0).empty());
  CHECK(greedy_decode(stack({1, 0, 1}), 0) == std::vector<SymbolId>{1, 1});
}

TEST_CASE("beam_decode on a single frame") {
  Mat<double> lp(1, 2);
  lp(0, 0) = std::log(0.4);  // blank
  lp(0, 1) = std::log(0.6);
  auto hyps = beam_decode(lp, 4, 2, 0);
  REQUIRE(hyps.size() == 2);
  CHECK(hyps[0].label == std::vector<SymbolId>{1});
  CHECK(std::exp(hyps[0].log_prob) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(hyps[1].label.empty());
  CHECK(std::exp(hyps[1].log_prob) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("beam_decode merges alignments of the two-frame uniform instance") {
  Mat<double> lp = uniform_two_frames();
  auto hyps = beam_decode(lp, 8, 3, 0);
  REQUIRE(hyps.size() >= 2);
  CHECK(hyps[0].label == std::vector<SymbolId>{1});
  CHECK(std::exp(hyps[0].log_prob) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(hyps[1].label.empty());
  CHECK(std::exp(hyps[1].log_prob) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("beam_decode is exact when the beam covers the lattice") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 20; ++iter) {
    int frames = 1 + static_cast<int>(rng() % 4);  // <= 4
    int vocab = 2 + static_cast<int>(rng() % 2);   // <= 3
    Mat<double> lp = random_log_probs<double>(frames, vocab, rng);
    auto labelings = oracles::all_labelings(lp, 0);
    int width = static_cast<int>(labelings.size()) + 4;
    auto hyps = beam_decode(lp, width, width, 0);

    // Each reported hypothesis carries its exact alignment-summed mass.
    for (const auto& h : hyps) {
      double expected = oracles::ctc_brute_force(lp, h.label, 0);
      CHECK(std::exp(h.log_prob) == doctest::Approx(expected).epsilon(1e-10));
    }
    // And the top hypothesis is the true argmax labeling.
    double best = -1.0;
    for (const auto& label : labelings) {
      best = std::max(best, oracles::ctc_brute_force(lp, label, 0));
    }
    CHECK(std::exp(hyps[0].log_prob) == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("beam_decode degenerate widths") {
  Mat<double> lp = uniform_two_frames();
  auto hyps = beam_decode(lp, 1, 1, 0);
  CHECK(hyps.size() == 1);
  CHECK_THROWS_AS(beam_decode(lp, 1, 2, 0), Error);
  CHECK_THROWS_AS(beam_decode(lp, 0, 0, 0), Error);
}
