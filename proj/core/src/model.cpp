#include "esrnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esrnn/error.hpp"

namespace esrnn {

namespace {

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

constexpr double kLogFloor = 1e-300;

}  // namespace

ModelParams ModelParams::zeros(std::size_t hidden, std::size_t inputs_eff, std::size_t outputs) {
  return {Mat(hidden, hidden), Mat(hidden, inputs_eff), Mat(outputs, hidden), Vec(hidden)};
}

void ModelParams::validate() const {
  const std::size_t n = W.rows();
  if (n == 0 || W.cols() != n) throw UsageError("ModelParams: W must be square and nonempty, got " + shape(W));
  if (Wi.rows() != n) throw UsageError("ModelParams: Wi is " + shape(Wi) + ", expected " + std::to_string(n) + " rows");
  if (U.cols() != n || U.rows() == 0) throw UsageError("ModelParams: U is " + shape(U) + ", expected " + std::to_string(n) + " columns");
  if (b.size() != n) throw UsageError("ModelParams: b has " + std::to_string(b.size()) + " entries, expected " + std::to_string(n));
}

void Sequence::validate(std::size_t n_classes) const {
  if (frames.rows() == 0) throw UsageError("Sequence: empty");
  if (labels.size() != frames.rows()) {
    throw UsageError("Sequence: " + std::to_string(frames.rows()) + " frames but " +
                     std::to_string(labels.size()) + " labels");
  }
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] >= n_classes) {
      throw UsageError("Sequence: label " + std::to_string(labels[t]) + " at t=" + std::to_string(t) +
                       " outside [0, " + std::to_string(n_classes) + ")");
    }
  }
}

Mat augment_inputs(const Mat& frames, const ArmaConfig& cfg) {
  const std::size_t T = frames.rows();
  const std::size_t ni = frames.cols();
  Mat out(T, cfg.augmented_inputs(ni));
  for (std::size_t t = 0; t < T; ++t) {
    auto dst = out.row(t);
    for (std::size_t k = 0; k < cfg.window(); ++k) {
      // Block k holds frame t - delta2 + k.
      const auto src_t = static_cast<std::ptrdiff_t>(t + k) - static_cast<std::ptrdiff_t>(cfg.delta2);
      if (src_t < 0 || src_t >= static_cast<std::ptrdiff_t>(T)) continue;
      const auto src = frames.row(static_cast<std::size_t>(src_t));
      std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(k * ni));
    }
  }
  return out;
}

Vec apply_head(OutputHead head, const Vec& z) {
  if (head == OutputHead::linear) return z;
  const double m = *std::max_element(z.begin(), z.end());
  Vec y(z.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n) {
    y[n] = std::exp(z[n] - m);
    sum += y[n];
  }
  for (double& v : y) v /= sum;
  return y;
}

ForwardTrace forward_augmented(const ModelParams& params, const Mat& augmented,
                               const ArmaConfig& cfg, const Vec& h0) {
  params.validate();
  const std::size_t n = params.hidden();
  if (augmented.cols() != params.inputs_eff()) {
    throw UsageError("forward: augmented input width " + std::to_string(augmented.cols()) +
                     " does not match Wi (" + shape(params.Wi) + ")");
  }
  if (h0.size() != n) {
    throw UsageError("forward: h0 has " + std::to_string(h0.size()) + " entries, expected " + std::to_string(n));
  }
  const std::size_t T = augmented.rows();
  ForwardTrace tr{Mat(T, n), Mat(T, n), Mat(T, params.outputs()), h0};

  for (std::size_t t = 0; t < T; ++t) {
    const Vec rec = matvec(params.W, tr.previous_state(t));
    const Vec inp = matvec(params.Wi, augmented.row(t));
    auto p = tr.p.row(t);
    auto h = tr.h.row(t);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rec[i] + inp[i] + params.b[i];
      h[i] = apply_nonlin(cfg.nonlin, p[i]);
    }
    const Vec y = apply_head(cfg.head, matvec(params.U, h));
    std::copy(y.begin(), y.end(), tr.y.row(t).begin());
    if (!all_finite(p) || !all_finite(y.span())) {
      throw NumericError("forward: non-finite value at t=" + std::to_string(t + 1));
    }
  }
  return tr;
}

ForwardTrace forward(const ModelParams& params, const Sequence& seq, const ArmaConfig& cfg,
                     const Vec& h0) {
  return forward_augmented(params, augment_inputs(seq, cfg), cfg, h0);
}

ForwardTrace forward(const ModelParams& params, const Sequence& seq, const ArmaConfig& cfg) {
  return forward(params, seq, cfg, Vec(params.hidden()));
}

CostBreakdown cost_breakdown(const ForwardTrace& trace, const Sequence& seq, OutputHead head) {
  const std::size_t T = trace.length();
  if (seq.labels.size() != T) {
    throw UsageError("cost: trace has " + std::to_string(T) + " steps, sequence has " +
                     std::to_string(seq.labels.size()) + " labels");
  }
  CostBreakdown out;
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto y = trace.y.row(t);
    const std::size_t label = seq.labels[t];
    if (label >= y.size()) throw UsageError("cost: label out of range at t=" + std::to_string(t));
    double jt = 0.0;
    if (head == OutputHead::linear) {
      for (std::size_t n = 0; n < y.size(); ++n) {
        const double d = (n == label) ? 1.0 : 0.0;
        jt += (y[n] - d) * (y[n] - d);
      }
    } else {
      double yl = y[label];
      if (yl < kLogFloor) {
        yl = kLogFloor;
        ++out.clamp_events;
      }
      jt = -std::log(yl);
    }
    total += jt;
  }
  out.value = total / static_cast<double>(T);
  return out;
}

double cost(const ForwardTrace& trace, const Sequence& seq, OutputHead head) {
  return cost_breakdown(trace, seq, head).value;
}

std::size_t argmax(std::span<const double> x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

}  // namespace esrnn
