#include <doctest.h>

#include <cmath>
#include <random>

#include "esrnn/clipping.hpp"
#include "esrnn/echo_state.hpp"
#include "esrnn/error.hpp"
#include "esrnn/tasks.hpp"
#include "oracles.hpp"

using namespace esrnn;

namespace {

GradSet random_grads(std::mt19937_64& rng, const ModelParams& p, double scale) {
  GradSet g = GradSet::zeros_like(p);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : g.dW.data()) v = u(rng);
  for (double& v : g.dWi.data()) v = u(rng);
  for (double& v : g.dU.data()) v = u(rng);
  for (double& v : g.db.span()) v = u(rng);
  return g;
}

}  // namespace

TEST_CASE("clip below the threshold is the identity") {
  std::mt19937_64 rng(1);
  const ModelParams p = ModelParams::zeros(3, 2, 2);
  const GradSet g = random_grads(rng, p, 0.01);
  const auto r = clip(g, 1.0);
  CHECK_FALSE(r.clipped);
  CHECK(r.grads == g);
  CHECK_THROWS_AS(clip(g, 0.0), UsageError);
}

TEST_CASE("all-ones gradient of norm 10") {
  // W, Wi and U hold 100 ones between them; b stays zero.
  const ModelParams p = ModelParams::zeros(5, 10, 5);
  GradSet g = GradSet::zeros_like(p);
  for (double& v : g.dW.data()) v = 1.0;
  for (double& v : g.dWi.data()) v = 1.0;
  for (double& v : g.dU.data()) v = 1.0;
  g.db = Vec(5, 0.0);
  CHECK(g.norm() == 10.0);
  const auto r = clip(g, 1.0);
  CHECK(r.clipped);
  for (double v : r.grads.dW.data()) CHECK(v == doctest::Approx(0.1).epsilon(1e-15));
  for (double v : r.grads.dU.data()) CHECK(v == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("clip scales without changing direction") {
  std::mt19937_64 rng(7);
  const ModelParams p = ModelParams::zeros(4, 3, 2);
  for (int rep = 0; rep < 100; ++rep) {
    const GradSet g = random_grads(rng, p, 2.0);
    const double threshold = std::uniform_real_distribution<double>(0.1, 6.0)(rng);
    const auto r = clip(g, threshold);
    const double n = g.norm();
    CHECK(std::abs(r.grads.norm() - std::min(n, threshold)) <= 1e-12 * std::max(1.0, n));
    CHECK(r.grads.norm() <= n);
    CHECK(r.clipped == (n > threshold));
    const double factor = r.clipped ? threshold / n : 1.0;
    for (std::size_t i = 0; i < g.dW.data().size(); ++i) CHECK(r.grads.dW.data()[i] == g.dW.data()[i] * factor);
  }
}

TEST_CASE("train_clipped") {
  SynthSpec spec;
  spec.T = 20;
  spec.num_sequences = 6;
  spec.n_inputs = 3;
  spec.n_outputs = 3;
  spec.context_span = 1;
  spec.seed = 12;
  const auto data = generate(spec);
  const ArmaConfig cfg{1, 1, Nonlinearity::tanh, OutputHead::softmax};
  std::mt19937_64 rng = make_rng(12, RngStream::init);
  const ModelParams init = init_params(8, cfg.augmented_inputs(3), 3, cfg, rng);

  SUBCASE("an enormous threshold is plain descent") {
    ClipConfig c;
    c.threshold = 1e12;
    c.mu0 = 0.3;
    c.epochs = 4;
    const auto r = train_clipped(init, data, cfg, c);
    CHECK(r.params == oracle::plain_descent(init, data, cfg, 0.3, 4, c.seed));
    for (const auto& rep : r.reports) CHECK(rep.clip_events == 0);
  }
  SUBCASE("deterministic and counting clip events") {
    ClipConfig c;
    c.threshold = 1e-3;
    c.epochs = 2;
    c.momentum = 0.3;
    const auto a = train_clipped(init, data, cfg, c);
    const auto b = train_clipped(init, data, cfg, c);
    REQUIRE(a.reports.size() == 2);
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(a.reports[e].same_trajectory(b.reports[e]));
      CHECK(a.reports[e].clip_events == data.size());
      CHECK(a.reports[e].max_lambda == 0.0);
    }
  }
  SUBCASE("invalid configuration") {
    ClipConfig c;
    c.threshold = -1.0;
    CHECK_THROWS_AS(train_clipped(init, data, cfg, c), UsageError);
  }
}
