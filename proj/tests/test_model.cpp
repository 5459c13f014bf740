#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "esrnn/error.hpp"
#include "esrnn/model.hpp"
#include "oracles.hpp"

using namespace esrnn;

namespace {

Sequence ramp(std::size_t T, std::size_t n_classes = 2) {
  Sequence s{Mat(T, 1), std::vector<std::size_t>(T, 0)};
  for (std::size_t t = 0; t < T; ++t) {
    s.frames(t, 0) = static_cast<double>(t + 1);
    s.labels[t] = t % n_classes;
  }
  return s;
}

}  // namespace

TEST_CASE("augment_inputs") {
  const Sequence s = ramp(3);
  SUBCASE("AR window is the identity") {
    const Mat out = augment_inputs(s, ArmaConfig{});
    CHECK(out == s.frames);
  }
  SUBCASE("symmetric window zero-pads the edges") {
    const Mat out = augment_inputs(s, ArmaConfig{1, 1});
    CHECK(out == Mat{{0, 1, 2}, {1, 2, 3}, {2, 3, 0}});
  }
  SUBCASE("look-back only on a single frame") {
    Sequence one{Mat{{7.0}}, {0}};
    CHECK(augment_inputs(one, ArmaConfig{0, 2}) == Mat{{0, 0, 7}});
  }
}

TEST_CASE("forward with zero weights") {
  const Sequence s = ramp(4);
  ModelParams p = ModelParams::zeros(3, 1, 2);
  const auto tr = forward(p, s, ArmaConfig{0, 0, Nonlinearity::sigmoid, OutputHead::softmax});
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(tr.h(t, i) == 0.5);
    for (std::size_t o = 0; o < 2; ++o) CHECK(tr.y(t, o) == 0.5);
  }
  CHECK(cost(tr, s, OutputHead::softmax) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("forward rejects inconsistent shapes and non-finite values") {
  const Sequence s = ramp(3);
  ModelParams p = ModelParams::zeros(2, 1, 2);
  CHECK_THROWS_AS(forward(p, s, ArmaConfig{1, 0}), UsageError);
  CHECK_THROWS_AS(forward(p, s, ArmaConfig{}, Vec(3)), UsageError);
  p.Wi(0, 0) = std::numeric_limits<double>::infinity();
  try {
    forward(p, s, ArmaConfig{0, 0, Nonlinearity::tanh, OutputHead::linear});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("t=1") != std::string::npos);
  }
}

TEST_CASE("ARMA forward equals the explicit moving-average form bit for bit") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 30; ++rep) {
    const ArmaConfig cfg{static_cast<std::size_t>(rep % 3), static_cast<std::size_t>((rep / 3) % 4),
                         rep % 2 ? Nonlinearity::tanh : Nonlinearity::sigmoid,
                         rep % 4 < 2 ? OutputHead::softmax : OutputHead::linear};
    const std::size_t ni = 2;
    const Sequence s = oracle::random_sequence(rng, 6, ni, 3);
    const ModelParams p = oracle::random_params(rng, 4, cfg.augmented_inputs(ni), 3);
    const Vec h0 = oracle::random_vec(rng, 4, 0.0, 1.0);
    const auto tr = forward(p, s, cfg, h0);
    const auto ref = oracle::arma_forward(p, s, cfg, h0);
    CHECK(tr.h == ref.h);
    CHECK(tr.y == ref.y);
  }
}

TEST_CASE("trace invariants") {
  std::mt19937_64 rng(5);
  const ArmaConfig cfg{1, 1, Nonlinearity::sigmoid, OutputHead::softmax};
  const Sequence s = oracle::random_sequence(rng, 20, 3, 5);
  const ModelParams p = oracle::random_params(rng, 6, cfg.augmented_inputs(3), 5, 3.0);
  const auto tr = forward(p, s, cfg);
  const auto again = forward(p, s, cfg);
  CHECK(tr.h == again.h);
  CHECK(tr.y == again.y);
  for (std::size_t t = 0; t < 20; ++t) {
    const auto y = tr.y.row(t);
    CHECK(std::abs(std::accumulate(y.begin(), y.end(), 0.0) - 1.0) <= 1e-12);
    for (double v : y) CHECK(v >= 0.0);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(tr.h(t, i) == apply_nonlin(cfg.nonlin, tr.p(t, i)));
      CHECK(tr.h(t, i) > 0.0);
      CHECK(tr.h(t, i) < 1.0);
    }
  }
}

TEST_CASE("softmax survives huge logits") {
  const Vec y = apply_head(OutputHead::softmax, Vec{1000.0, 0.0, -1000.0});
  CHECK(y[0] == 1.0);
  CHECK(y[2] == 0.0);
}

TEST_CASE("cost heads") {
  Sequence s{Mat(2, 1), {0, 1}};
  ForwardTrace tr{Mat(2, 1), Mat(2, 1), Mat{{1, 0}, {0, 1}}, Vec(1)};
  CHECK(cost(tr, s, OutputHead::softmax) == 0.0);
  CHECK(cost(tr, s, OutputHead::linear) == 0.0);

  ForwardTrace uniform{Mat(2, 1), Mat(2, 1), Mat{{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}}, Vec(1)};
  Sequence s4{Mat(2, 1), {3, 1}};
  CHECK(cost(uniform, s4, OutputHead::softmax) == doctest::Approx(std::log(4.0)).epsilon(1e-15));

  ForwardTrace zero{Mat(1, 1), Mat(1, 1), Mat{{1.0, 0.0}}, Vec(1)};
  Sequence wrong{Mat(1, 1), {1}};
  const auto c = cost_breakdown(zero, wrong, OutputHead::softmax);
  CHECK(c.clamp_events == 1);
  CHECK(c.value == doctest::Approx(-std::log(1e-300)));

  Sequence short_seq{Mat(1, 1), {0}};
  CHECK_THROWS_AS(cost(tr, short_seq, OutputHead::softmax), UsageError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  const std::vector<double> v{0.2, 0.4, 0.4};
  CHECK(argmax(v) == 1);
  const std::vector<double> flat{1.0, 1.0};
  CHECK(argmax(flat) == 0);
}
