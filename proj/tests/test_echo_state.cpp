#include <doctest.h>

#include <cmath>
#include <random>

#include "esrnn/echo_state.hpp"
#include "esrnn/error.hpp"
#include "oracles.hpp"

using namespace esrnn;

TEST_CASE("check_sufficient") {
  ModelParams p = ModelParams::zeros(2, 1, 2);
  p.W = Mat{{3.0, -0.9}, {1.0, 1.0}};
  auto r = check_sufficient(p, ArmaConfig{0, 0, Nonlinearity::sigmoid});
  CHECK(r.bound == 4.0);
  CHECK(r.inf_norm == doctest::Approx(3.9));
  CHECK(r.holds);

  p.W = Mat::identity(2);
  CHECK_FALSE(check_sufficient(p, ArmaConfig{0, 0, Nonlinearity::tanh}).holds);

  p.W = Mat(2, 2);
  CHECK(check_sufficient(p, ArmaConfig{0, 0, Nonlinearity::tanh}).holds);
}

TEST_CASE("zero recurrence forgets the initial state immediately") {
  std::mt19937_64 rng(6);
  const ArmaConfig cfg{0, 0, Nonlinearity::tanh, OutputHead::linear};
  ModelParams p = oracle::random_params(rng, 4, 2, 2);
  p.W = Mat(4, 4);
  const Sequence s = oracle::random_sequence(rng, 10, 2, 2);
  const auto r = verify_contraction(p, cfg, s, Vec(4, 0.0), Vec(4, 0.5));
  CHECK(r.t_steps == 10);
  CHECK(r.initial_gap == 0.5);
  for (double g : r.per_step_gap) CHECK(g == 0.0);
  CHECK(r.satisfied);
}

TEST_CASE("contraction at gamma * norm = 0.8 over 100 steps") {
  std::mt19937_64 rng(19);
  const ArmaConfig cfg{0, 0, Nonlinearity::sigmoid, OutputHead::softmax};
  ModelParams p = oracle::random_params(rng, 8, 3, 2);
  p.W = scale_to_inf_norm(p.W, 3.2);
  const Sequence s = oracle::random_sequence(rng, 100, 3, 2);
  const Vec h0 = oracle::random_vec(rng, 8, -1, 1);
  const Vec h1 = oracle::random_vec(rng, 8, -1, 1);
  const auto r = verify_contraction(p, cfg, s, h0, h1);
  CHECK(r.satisfied);
  CHECK(r.per_step_gap.back() < std::pow(0.8, 100) * r.initial_gap);
  CHECK(r.per_step_bound.size() == 100);
  CHECK(r.per_step_bound[0] == doctest::Approx(0.8 * r.initial_gap).epsilon(1e-12));

  CHECK_THROWS_AS(verify_contraction(p, cfg, s, h0, h0), UsageError);
}

TEST_CASE("sufficient condition implies contraction on random instances") {
  std::mt19937_64 rng(2718);
  for (int rep = 0; rep < 60; ++rep) {
    const ArmaConfig cfg{static_cast<std::size_t>(rep % 2), 0,
                         rep % 3 ? Nonlinearity::tanh : Nonlinearity::sigmoid};
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 9);
    ModelParams p = oracle::random_params(rng, n, cfg.augmented_inputs(2), 2, 2.0);
    const double frac = std::uniform_real_distribution<double>(0.05, 0.999)(rng);
    p.W = scale_to_inf_norm(p.W, frac / gamma_of(cfg.nonlin));
    REQUIRE(check_sufficient(p, cfg).holds);
    const Sequence s = oracle::random_sequence(rng, 40, 2, 2);
    const auto r = verify_contraction(p, cfg, s, oracle::random_vec(rng, n, -1, 1),
                                      oracle::random_vec(rng, n, -1, 1));
    CHECK(r.satisfied);
    for (std::size_t t = 0; t < r.t_steps; ++t) {
      CHECK(r.per_step_gap[t] <= r.per_step_bound[t] + kContractionSlack);
    }
  }
}

TEST_CASE("scale_to_inf_norm") {
  CHECK(scale_to_inf_norm(Mat::identity(3), 0.9) == Mat{{0.9, 0, 0}, {0, 0.9, 0}, {0, 0, 0.9}});
  CHECK_THROWS_AS(scale_to_inf_norm(Mat(2, 2), 1.0), UsageError);
  CHECK_THROWS_AS(scale_to_inf_norm(Mat::identity(2), 0.0), UsageError);

  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 50; ++rep) {
    Mat w(5, 5);
    for (double& v : w.data()) v = std::uniform_real_distribution<double>(-2, 2)(rng);
    w(rep % 5, rep % 3) = 0.0;
    const double target = std::uniform_real_distribution<double>(0.1, 10)(rng);
    const Mat once = scale_to_inf_norm(w, target);
    const Mat twice = scale_to_inf_norm(once, target);
    CHECK(std::abs(inf_norm(once) - target) <= 1e-12 * target);
    for (std::size_t i = 0; i < w.data().size(); ++i) {
      CHECK(std::signbit(once.data()[i]) == std::signbit(w.data()[i]));
      CHECK((once.data()[i] == 0.0) == (w.data()[i] == 0.0));
      CHECK(std::abs(twice.data()[i] - once.data()[i]) <= 1e-12 * target);
    }
  }
}

TEST_CASE("initialization starts strictly feasible") {
  for (auto nl : {Nonlinearity::sigmoid, Nonlinearity::tanh}) {
    std::mt19937_64 rng(3);
    const ArmaConfig cfg{1, 1, nl};
    const ModelParams p = init_params(16, cfg.augmented_inputs(4), 3, cfg, rng);
    p.validate();
    CHECK(inf_norm(p.W) == doctest::Approx(kInitInfNormFraction / gamma_of(nl)).epsilon(1e-12));
    CHECK(check_sufficient(p, cfg).holds);
    const double r = 1.0 / std::sqrt(12.0);
    for (double v : p.Wi.data()) CHECK(std::abs(v) <= r);
    for (double v : p.b.span()) CHECK(v == 0.0);
  }
}
