#include "esrnn/primal_dual.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "esrnn/error.hpp"
#include "training_loop.hpp"

namespace esrnn {

void PdConfig::validate() const {
  if (!(mu0 > 0.0)) throw UsageError("PdConfig: mu0 must be positive");
  if (!(dual_mu_scale > 0.0)) throw UsageError("PdConfig: dual_mu_scale must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw UsageError("PdConfig: momentum must lie in [0, 1)");
  if (batch == 0) throw UsageError("PdConfig: batch must be at least 1");
}

Mat shrink(const Mat& x, const Vec& lambda, double mu) {
  if (lambda.size() != x.rows()) {
    throw UsageError("shrink: lambda has " + std::to_string(lambda.size()) + " entries for " +
                     std::to_string(x.rows()) + " rows");
  }
  if (!(mu >= 0.0)) throw UsageError("shrink: mu must be non-negative");
  Mat out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!(lambda[i] >= 0.0)) throw UsageError("shrink: negative multiplier on row " + std::to_string(i));
    const double tau = lambda[i] * mu;
    const auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) {
      const double v = src[j];
      if (v >= tau) {
        dst[j] = v - tau;
      } else if (v <= -tau) {
        dst[j] = v + tau;
      } else {
        dst[j] = 0.0;
      }
    }
  }
  return out;
}

namespace {

void check_shapes(const OptState& s, const GradSet& g) {
  const auto& p = s.params;
  if (g.dW.rows() != p.W.rows() || g.dW.cols() != p.W.cols() || g.dWi.rows() != p.Wi.rows() ||
      g.dWi.cols() != p.Wi.cols() || g.dU.rows() != p.U.rows() || g.dU.cols() != p.U.cols() ||
      g.db.size() != p.b.size()) {
    throw UsageError("primal_step: gradient shapes do not match parameters");
  }
  if (s.dual.lambda.size() != p.hidden()) throw UsageError("primal_step: lambda length mismatch");
}

// Descent on every block; W is left at its tentative (pre-prox) value.
void descend(OptState& s, const GradSet& g, double mu, double momentum) {
  detail::momentum_step(s.params.W.data(), s.velocity.dW.data(), g.dW.data(), mu, momentum);
  detail::momentum_step(s.params.Wi.data(), s.velocity.dWi.data(), g.dWi.data(), mu, momentum);
  detail::momentum_step(s.params.U.data(), s.velocity.dU.data(), g.dU.data(), mu, momentum);
  detail::momentum_step(s.params.b.span(), s.velocity.db.span(), g.db.span(), mu, momentum);
}

}  // namespace

OptState primal_step(OptState state, const GradSet& grads, double mu, double momentum) {
  check_shapes(state, grads);
  ++state.k;
  descend(state, grads, mu, momentum);
  state.params.W = shrink(state.params.W, state.dual.lambda, mu);
  detail::check_finite(state.params, state.k);
  return state;
}

OptState primal_step_projected(OptState state, const GradSet& grads, double mu, double momentum,
                               double gamma) {
  check_shapes(state, grads);
  ++state.k;
  descend(state, grads, mu, momentum);
  state.params.W = project_rows(state.params.W, gamma);
  detail::check_finite(state.params, state.k);
  return state;
}

void dual_step(DualState& dual, std::span<const double> row_norms, double mu, double gamma) {
  if (!(gamma > 0.0)) throw UsageError("dual_step: gamma must be positive");
  if (row_norms.size() != dual.lambda.size()) throw UsageError("dual_step: row count mismatch");
  const double bound = 1.0 / gamma;
  for (std::size_t i = 0; i < row_norms.size(); ++i) {
    dual.lambda[i] = std::max(0.0, dual.lambda[i] + mu * (row_norms[i] - bound));
  }
}

OptState dual_step(OptState state, double mu, double gamma) {
  std::vector<double> norms(state.params.hidden());
  for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = row_l1(state.params.W, i);
  dual_step(state.dual, norms, mu, gamma);
  return state;
}

std::vector<double> project_l1_ball(std::span<const double> x, double radius) {
  if (!(radius > 0.0)) throw UsageError("project_l1_ball: radius must be positive");
  std::vector<double> out(x.begin(), x.end());
  double l1 = 0.0;
  for (double v : x) l1 += std::abs(v);
  if (l1 <= radius) return out;

  // Sort-based threshold search for the simplex of magnitudes.
  std::vector<double> mag(x.size());
  std::transform(x.begin(), x.end(), mag.begin(), [](double v) { return std::abs(v); });
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    cumsum += mag[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (mag[j] - candidate > 0.0) theta = candidate;
  }
  for (double& v : out) {
    const double m = std::max(std::abs(v) - theta, 0.0);
    v = std::copysign(m, v);
  }
  return out;
}

Mat project_rows(const Mat& w, double gamma) {
  if (!(gamma > 0.0)) throw UsageError("project_rows: gamma must be positive");
  const double radius = 1.0 / gamma;
  Mat out = w;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (row_l1(w, i) <= radius) continue;
    const auto projected = project_l1_ball(w.row(i), radius);
    std::copy(projected.begin(), projected.end(), out.row(i).begin());
  }
  return out;
}

TrainResult train(const ModelParams& init, std::span<const Sequence> data, const ArmaConfig& cfg,
                  const PdConfig& pd, const DualObserver& observer) {
  pd.validate();
  init.validate();
  OptState state = OptState::start(init);
  const double gamma = gamma_of(cfg.nonlin);

  detail::LoopSettings settings{pd.mu0, pd.schedule, pd.momentum, pd.epochs, pd.batch, pd.seed};
  std::vector<double> norms(init.hidden());
  std::vector<double> before(init.hidden());

  auto update = [&](OptState& s, const GradSet& grads, double mu, detail::EpochTally&) {
    if (pd.variant == PdVariant::project_rows) {
      s = primal_step_projected(std::move(s), grads, mu, pd.momentum, gamma);
      return;
    }
    // The dual ascent uses the row norms of W before this primal step.
    for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = row_l1(s.params.W, i);
    s = primal_step(std::move(s), grads, mu, pd.momentum);
    if (pd.freeze_dual) return;
    std::copy(s.dual.lambda.begin(), s.dual.lambda.end(), before.begin());
    const double dual_mu = mu * pd.dual_mu_scale;
    dual_step(s.dual, norms, dual_mu, gamma);
    if (observer) {
      observer(DualStepEvent{s.k, dual_mu, 1.0 / gamma, norms, before, s.dual.lambda.span()});
    }
  };

  TrainResult result;
  result.reports = detail::run_epochs(state, data, cfg, settings, update);
  result.params = std::move(state.params);
  result.dual = std::move(state.dual);
  result.iterations = state.k;
  return result;
}

}  // namespace esrnn
