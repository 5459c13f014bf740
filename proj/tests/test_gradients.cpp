#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "esrnn/error.hpp"
#include "esrnn/gradients.hpp"
#include "oracles.hpp"

using namespace esrnn;

namespace {

ArmaConfig config_for(int i) {
  return ArmaConfig{i % 2 ? 2u : 0u, i % 2 ? 3u : 0u,
                    (i / 2) % 2 ? Nonlinearity::tanh : Nonlinearity::sigmoid,
                    (i / 4) % 2 ? OutputHead::linear : OutputHead::softmax};
}

double mean_abs_error(const GradSet& a, const GradSet& b) {
  double sum = 0.0;
  std::size_t n = 0;
  auto add = [&](std::span<const double> x, std::span<const double> y) {
    for (std::size_t i = 0; i < x.size(); ++i, ++n) sum += std::abs(x[i] - y[i]);
  };
  add(a.dW.data(), b.dW.data());
  add(a.dWi.data(), b.dWi.data());
  add(a.dU.data(), b.dU.data());
  add(a.db.span(), b.db.span());
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("single step has no recurrent gradient") {
  std::mt19937_64 rng(1);
  const ArmaConfig cfg{};
  const Sequence s = oracle::random_sequence(rng, 1, 3, 2);
  const ModelParams p = oracle::random_params(rng, 4, 3, 2);
  const GradSet g = gradient(p, cfg, s);
  for (double v : g.dW.data()) CHECK(v == 0.0);
}

TEST_CASE("zero network with uniform softmax has closed-form output gradient") {
  const ArmaConfig cfg{0, 0, Nonlinearity::sigmoid, OutputHead::softmax};
  const Sequence s{Mat{{0.3}, {-0.7}}, {0, 1}};
  const ModelParams p = ModelParams::zeros(2, 1, 2);
  const GradSet g = gradient(p, cfg, s);
  // h_t = 0.5 for both units; y_t = (0.5, 0.5); targets e_0 then e_1.
  // dU(n, j) = (1/2) * sum_t (0.5 - d_{n,t}) * 0.5 = 0 for both classes.
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(g.dU(n, j) == 0.0);
  }
  const Sequence same{Mat{{0.3}, {-0.7}}, {0, 0}};
  const GradSet g2 = gradient(p, cfg, same);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(g2.dU(0, j) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(g2.dU(1, j) == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("backprop matches central differences") {
  std::mt19937_64 rng(77);
  SUBCASE("N=6, N_I=3, N_o=4, T=12 for every head, unit and window") {
    for (int i = 0; i < 8; ++i) {
      const ArmaConfig cfg = config_for(i);
      const Sequence s = oracle::random_sequence(rng, 12, 3, 4);
      const ModelParams p = oracle::random_params(rng, 6, cfg.augmented_inputs(3), 4, 0.5);
      const double err = max_relative_error(gradient(p, cfg, s), finite_diff(p, cfg, s, 1e-5), 1e-3);
      CHECK_MESSAGE(err < 1e-6, "config " << i);
    }
  }
  SUBCASE("twenty four seeded small configurations") {
    for (int seed = 0; seed < 24; ++seed) {
      std::mt19937_64 r(1000 + seed);
      const ArmaConfig cfg = config_for(seed);
      const std::size_t n = 2 + static_cast<std::size_t>(seed % 7);
      const std::size_t T = 5 + static_cast<std::size_t>(seed % 16);
      const Sequence s = oracle::random_sequence(r, T, 2, 3);
      const ModelParams p = oracle::random_params(r, n, cfg.augmented_inputs(2), 3, 0.7);
      const double err = max_relative_error(gradient(p, cfg, s), finite_diff(p, cfg, s, 1e-5), 1e-3);
      CHECK_MESSAGE(err < 1e-6, "seed " << seed);
    }
  }
}

TEST_CASE("finite differences of a constant cost vanish") {
  const ArmaConfig cfg{0, 0, Nonlinearity::tanh, OutputHead::linear};
  std::mt19937_64 rng(8);
  ModelParams p = oracle::random_params(rng, 3, 2, 2);
  p.U = Mat(2, 3);
  // With U = 0 the linear head always emits 0; labels select one-hot
  // targets so the cost is 1 regardless of W, Wi and b.
  const Sequence s = oracle::random_sequence(rng, 6, 2, 2);
  const GradSet fd = finite_diff(p, cfg, s, 1e-5);
  for (double v : fd.dW.data()) CHECK(std::abs(v) <= 1e-9);
  for (double v : fd.dWi.data()) CHECK(std::abs(v) <= 1e-9);
  for (double v : fd.db.span()) CHECK(std::abs(v) <= 1e-9);
  CHECK_THROWS_AS(finite_diff(p, cfg, s, 0.0), UsageError);
}

TEST_CASE("agreement error is V-shaped in the probe width") {
  int v_shaped = 0;
  for (int seed = 0; seed < 6; ++seed) {
    std::mt19937_64 rng(500 + seed);
    const ArmaConfig cfg{1, 1, Nonlinearity::tanh,
                         seed % 2 ? OutputHead::linear : OutputHead::softmax};
    const Sequence s = oracle::random_sequence(rng, 10, 2, 3);
    const ModelParams p = oracle::random_params(rng, 5, cfg.augmented_inputs(2), 3, 1.0);
    const GradSet exact = gradient(p, cfg, s);
    std::vector<double> err;
    for (double eps : {1e-4, 1e-5, 1e-6}) err.push_back(mean_abs_error(exact, finite_diff(p, cfg, s, eps)));
    INFO("seed " << seed << ": " << err[0] << " " << err[1] << " " << err[2]);
    CHECK(err[1] < err[0]);
    CHECK(err[1] < err[2]);
    if (err[1] < err[0] && err[1] < err[2]) ++v_shaped;
  }
  CHECK(v_shaped == 6);
}

TEST_CASE("batch gradient is the average of per-sequence gradients") {
  std::mt19937_64 rng(31);
  const ArmaConfig cfg{1, 0, Nonlinearity::sigmoid, OutputHead::softmax};
  std::vector<Sequence> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(oracle::random_sequence(rng, 4 + i, 2, 3));
  const ModelParams p = oracle::random_params(rng, 4, cfg.augmented_inputs(2), 3);
  GradSet sum = GradSet::zeros_like(p);
  for (const auto& s : batch) sum.accumulate(gradient(p, cfg, s));
  sum.scale(1.0 / 5.0);
  const GradSet avg = batch_gradient(p, cfg, batch);
  CHECK(max_relative_error(sum, avg, 1.0) <= 1e-12);

  // Gradient of the summed cost, by differences of the summed cost.
  GradSet fd_sum = GradSet::zeros_like(p);
  for (const auto& s : batch) fd_sum.accumulate(finite_diff(p, cfg, s, 1e-5));
  fd_sum.scale(1.0 / 5.0);
  CHECK(max_relative_error(avg, fd_sum, 1e-3) < 1e-6);
}

TEST_CASE("terminal error signal") {
  std::mt19937_64 rng(4);
  const ArmaConfig cfg{0, 1, Nonlinearity::tanh, OutputHead::softmax};
  const Sequence s = oracle::random_sequence(rng, 7, 2, 3);
  const ModelParams p = oracle::random_params(rng, 3, cfg.augmented_inputs(2), 3);
  const auto tr = forward(p, s, cfg);
  const auto res = backprop_with_deltas(p, cfg, s, tr);
  CHECK(res.delta.rows() == 7);
  // At the last step only the same-time term contributes.
  const Vec e = [&] {
    Vec out(3);
    for (std::size_t o = 0; o < 3; ++o) out[o] = tr.y(6, o) - (s.labels[6] == o ? 1.0 : 0.0);
    return out;
  }();
  const Vec back = matvec_transposed(p.U, e.span());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(res.delta(6, i) == nonlin_deriv(cfg.nonlin, tr.p(6, i)) * back[i]);
  }
  CHECK(res.grads == backprop(p, cfg, s, tr));

  const Sequence shorter = oracle::random_sequence(rng, 6, 2, 3);
  CHECK_THROWS_AS(backprop(p, cfg, shorter, tr), UsageError);
}

TEST_CASE("grad_regime_report") {
  ModelParams p = ModelParams::zeros(3, 1, 2);
  const ArmaConfig sig{};
  p.W = Mat{{0.5, 0, 0}, {0, 0.5, 0}, {0, 0, 0.5}};
  auto r = grad_regime_report(p, sig);
  CHECK(r.two_norm_W == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.vanish_bound_holds);
  CHECK_FALSE(r.explode_necessary_holds);

  p.W = Mat{{5, 0, 0}, {0, 5, 0}, {0, 0, 5}};
  r = grad_regime_report(p, sig);
  CHECK(r.explode_necessary_holds);
  CHECK_FALSE(r.vanish_bound_holds);
}

TEST_CASE("spectral norm agrees with a singular value decomposition") {
  std::mt19937_64 rng(123);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rep % 8);
    Mat w(n, n);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : w.data()) v = g(rng);
    const double ref = oracle::two_norm(w);
    CHECK(std::abs(spectral_norm(w) - ref) <= 1e-8 * std::max(1.0, ref));
  }
  CHECK(spectral_norm(Mat(3, 3)) == 0.0);
}
