#include "esrnn/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "esrnn/error.hpp"

namespace esrnn {

namespace {

template <typename F>
void for_each_block(GradSet& g, F&& f) {
  f(g.dW.data());
  f(g.dWi.data());
  f(g.dU.data());
  f(g.db.span());
}

template <typename F>
void for_each_block(const GradSet& g, F&& f) {
  f(g.dW.data());
  f(g.dWi.data());
  f(g.dU.data());
  f(g.db.span());
}

// dJ_t/dz_t where z_t = U h_t is the output pre-activation.
Vec output_error(OutputHead head, std::span<const double> y, std::size_t label) {
  Vec e(y.size());
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double d = (n == label) ? 1.0 : 0.0;
    e[n] = (head == OutputHead::softmax) ? (y[n] - d) : -2.0 * (d - y[n]);
  }
  return e;
}

void add_outer(Mat& m, std::span<const double> col, std::span<const double> row) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    const double ci = col[i];
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += ci * row[j];
  }
}

}  // namespace

GradSet GradSet::zeros_like(const ModelParams& params) {
  return {Mat(params.W.rows(), params.W.cols()), Mat(params.Wi.rows(), params.Wi.cols()),
          Mat(params.U.rows(), params.U.cols()), Vec(params.b.size())};
}

double GradSet::norm() const {
  double acc = 0.0;
  for_each_block(*this, [&](std::span<const double> x) {
    for (double v : x) acc += v * v;
  });
  return std::sqrt(acc);
}

void GradSet::scale(double factor) {
  for_each_block(*this, [&](std::span<double> x) {
    for (double& v : x) v *= factor;
  });
}

void GradSet::accumulate(const GradSet& other) {
  auto add = [](std::span<double> dst, std::span<const double> src) {
    if (dst.size() != src.size()) throw UsageError("GradSet::accumulate: shape mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  };
  add(dW.data(), other.dW.data());
  add(dWi.data(), other.dWi.data());
  add(dU.data(), other.dU.data());
  add(db.span(), other.db.span());
}

BackpropResult backprop_with_deltas(const ModelParams& params, const ArmaConfig& cfg,
                                    const Sequence& seq, const ForwardTrace& trace) {
  params.validate();
  const std::size_t T = trace.length();
  const std::size_t n = params.hidden();
  if (T == 0 || seq.length() != T || seq.labels.size() != T || trace.p.cols() != n ||
      trace.y.cols() != params.outputs() || trace.h0.size() != n) {
    throw UsageError("backprop: trace does not match parameters and sequence");
  }
  const Mat inputs = augment_inputs(seq, cfg);
  if (inputs.cols() != params.inputs_eff()) {
    throw UsageError("backprop: augmented input width " + std::to_string(inputs.cols()) +
                     " does not match Wi columns " + std::to_string(params.inputs_eff()));
  }

  BackpropResult out{GradSet::zeros_like(params), Mat(T, n)};
  GradSet& g = out.grads;

  // delta_{T+1} = 0, so the recurrent term is skipped on the last step.
  for (std::size_t s = T; s-- > 0;) {
    const Vec e = output_error(cfg.head, trace.y.row(s), seq.labels[s]);
    Vec upstream = matvec_transposed(params.U, e.span());
    if (s + 1 < T) {
      const Vec rec = matvec_transposed(params.W, out.delta.row(s + 1));
      for (std::size_t i = 0; i < n; ++i) upstream[i] += rec[i];
    }
    auto delta = out.delta.row(s);
    const auto p = trace.p.row(s);
    for (std::size_t i = 0; i < n; ++i) delta[i] = nonlin_deriv(cfg.nonlin, p[i]) * upstream[i];

    add_outer(g.dW, delta, trace.previous_state(s));
    add_outer(g.dWi, delta, inputs.row(s));
    add_outer(g.dU, e.span(), trace.h.row(s));
    for (std::size_t i = 0; i < n; ++i) g.db[i] += delta[i];
  }
  g.scale(1.0 / static_cast<double>(T));
  for_each_block(std::as_const(g), [](std::span<const double> x) {
    if (!all_finite(x)) throw NumericError("backprop: non-finite gradient");
  });
  return out;
}

GradSet backprop(const ModelParams& params, const ArmaConfig& cfg, const Sequence& seq,
                 const ForwardTrace& trace) {
  return backprop_with_deltas(params, cfg, seq, trace).grads;
}

GradSet gradient(const ModelParams& params, const ArmaConfig& cfg, const Sequence& seq) {
  return backprop(params, cfg, seq, forward(params, seq, cfg));
}

GradSet batch_gradient(const ModelParams& params, const ArmaConfig& cfg,
                       std::span<const Sequence> batch) {
  if (batch.empty()) throw UsageError("batch_gradient: empty batch");
  GradSet total = gradient(params, cfg, batch[0]);
  for (std::size_t i = 1; i < batch.size(); ++i) total.accumulate(gradient(params, cfg, batch[i]));
  if (batch.size() > 1) total.scale(1.0 / static_cast<double>(batch.size()));
  return total;
}

GradSet finite_diff(const ModelParams& params, const ArmaConfig& cfg, const Sequence& seq,
                    double eps) {
  if (!(eps > 0.0)) throw UsageError("finite_diff: eps must be positive");
  ModelParams probe = params;
  GradSet g = GradSet::zeros_like(params);
  auto objective = [&] { return cost(forward(probe, seq, cfg), seq, cfg.head); };
  auto sweep = [&](std::span<double> theta, std::span<double> dst) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + eps;
      const double up = objective();
      theta[i] = saved - eps;
      const double down = objective();
      theta[i] = saved;
      dst[i] = (up - down) / (2.0 * eps);
    }
  };
  sweep(probe.W.data(), g.dW.data());
  sweep(probe.Wi.data(), g.dWi.data());
  sweep(probe.U.data(), g.dU.data());
  sweep(probe.b.span(), g.db.span());
  return g;
}

double spectral_norm(const Mat& w, double tol, std::size_t max_iter, std::size_t* iterations) {
  if (w.rows() == 0 || w.cols() == 0) throw UsageError("spectral_norm: empty matrix");
  const std::size_t n = w.cols();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Vec v(n);
  for (double& x : v) x = dist(rng);

  auto normalize = [](Vec& x) {
    double s = 0.0;
    for (double e : x) s += e * e;
    s = std::sqrt(s);
    if (s > 0.0) {
      for (double& e : x) e /= s;
    }
    return s;
  };
  normalize(v);

  double sigma = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const Vec wv = matvec(w, v);
    Vec next = matvec_transposed(w, wv.span());
    double s2 = 0.0;
    for (double e : wv) s2 += e * e;
    const double estimate = std::sqrt(s2);
    if (normalize(next) == 0.0) {
      if (iterations) *iterations = it;
      return estimate;
    }
    v = std::move(next);
    if (it > 1 && std::abs(estimate - sigma) <= tol * estimate) {
      if (iterations) *iterations = it;
      // Rayleigh quotient at the refined vector.
      const Vec final_wv = matvec(w, v);
      double f2 = 0.0;
      for (double e : final_wv) f2 += e * e;
      return std::sqrt(f2);
    }
    sigma = estimate;
  }
  throw NumericError("spectral_norm: power iteration did not converge in " +
                     std::to_string(max_iter) + " iterations");
}

GradRegimeReport grad_regime_report(const ModelParams& params, const ArmaConfig& cfg) {
  GradRegimeReport r;
  r.two_norm_W = spectral_norm(params.W, 1e-10, 10000, &r.iterations);
  const double limit = 1.0 / gamma_of(cfg.nonlin);
  r.vanish_bound_holds = r.two_norm_W < limit;
  r.explode_necessary_holds = r.two_norm_W > limit;
  return r;
}

double max_relative_error(const GradSet& a, const GradSet& b, double floor) {
  double worst = 0.0;
  auto cmp = [&](std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UsageError("max_relative_error: shape mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double denom = std::max({std::abs(x[i]), std::abs(y[i]), floor});
      worst = std::max(worst, std::abs(x[i] - y[i]) / denom);
    }
  };
  cmp(a.dW.data(), b.dW.data());
  cmp(a.dWi.data(), b.dWi.data());
  cmp(a.dU.data(), b.dU.data());
  cmp(a.db.span(), b.db.span());
  return worst;
}

}  // namespace esrnn
