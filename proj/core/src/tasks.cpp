#include "esrnn/tasks.hpp"

#include <cmath>
#include <random>
#include <string>

#include "esrnn/error.hpp"
#include "esrnn/training.hpp"

namespace esrnn {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void add_noise(Mat& frames, double std_dev, std::mt19937_64& rng) {
  if (std_dev == 0.0) return;
  std::normal_distribution<double> noise(0.0, std_dev);
  for (double& v : frames.data()) v += noise(rng);
}

}  // namespace

void SynthSpec::validate() const {
  if (T == 0) throw UsageError("SynthSpec: T must be positive");
  if (num_sequences == 0) throw UsageError("SynthSpec: num_sequences must be positive");
  if (n_inputs == 0) throw UsageError("SynthSpec: n_inputs must be positive");
  if (n_outputs < 2) throw UsageError("SynthSpec: n_outputs must be at least 2");
  if (!(noise_std >= 0.0)) throw UsageError("SynthSpec: noise_std must be non-negative");
  if (task == SynthTask::delayed_copy) {
    if (context_span == 0) throw UsageError("SynthSpec: delayed_copy needs a delay of at least 1");
    if (n_inputs < n_outputs) throw UsageError("SynthSpec: delayed_copy needs n_inputs >= n_outputs");
  }
}

std::vector<double> class_thresholds(std::size_t n_classes) {
  std::vector<double> q;
  for (std::size_t i = 1; i < n_classes; ++i) {
    q.push_back(normal_quantile(static_cast<double>(i) / static_cast<double>(n_classes)));
  }
  return q;
}

std::size_t quantize_score(double score, std::span<const double> thresholds) {
  std::size_t c = 0;
  while (c < thresholds.size() && score >= thresholds[c]) ++c;
  return c;
}

namespace {

std::vector<Vec> draw_window_weights(const SynthSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const std::size_t width = 2 * spec.context_span + 1;
  std::vector<Vec> weights(width, Vec(spec.n_inputs));
  double sq = 0.0;
  for (auto& w : weights) {
    for (double& v : w) {
      v = unit(rng);
      sq += v * v;
    }
  }
  // Unit total norm makes the interior score standard normal.
  const double s = 1.0 / std::sqrt(sq);
  for (auto& w : weights) {
    for (double& v : w) v *= s;
  }
  return weights;
}

}  // namespace

std::vector<Vec> context_window_weights(const SynthSpec& spec) {
  auto rng = make_rng(spec.seed, RngStream::synth);
  return draw_window_weights(spec, rng);
}

std::vector<Sequence> gen_context_window(const SynthSpec& spec) {
  spec.validate();
  auto rng = make_rng(spec.seed, RngStream::synth);
  const auto weights = draw_window_weights(spec, rng);
  const auto thresholds = class_thresholds(spec.n_outputs);
  std::normal_distribution<double> unit(0.0, 1.0);

  const auto span = static_cast<std::ptrdiff_t>(spec.context_span);
  const auto T = static_cast<std::ptrdiff_t>(spec.T);
  std::vector<Sequence> data;
  data.reserve(spec.num_sequences);
  for (std::size_t s = 0; s < spec.num_sequences; ++s) {
    Sequence seq{Mat(spec.T, spec.n_inputs), std::vector<std::size_t>(spec.T)};
    for (double& v : seq.frames.data()) v = unit(rng);
    for (std::ptrdiff_t t = 0; t < T; ++t) {
      double score = 0.0;
      for (std::ptrdiff_t k = -span; k <= span; ++k) {
        const std::ptrdiff_t u = t + k;
        if (u < 0 || u >= T) continue;
        const auto frame = seq.frames.row(static_cast<std::size_t>(u));
        const Vec& w = weights[static_cast<std::size_t>(k + span)];
        for (std::size_t j = 0; j < frame.size(); ++j) score += w[j] * frame[j];
      }
      seq.labels[static_cast<std::size_t>(t)] = quantize_score(score, thresholds);
    }
    add_noise(seq.frames, spec.noise_std, rng);
    data.push_back(std::move(seq));
  }
  return data;
}

std::vector<Sequence> gen_delayed_copy(const SynthSpec& spec) {
  spec.validate();
  auto rng = make_rng(spec.seed, RngStream::synth);
  std::uniform_int_distribution<std::size_t> symbol(0, spec.n_outputs - 1);
  std::vector<Sequence> data;
  data.reserve(spec.num_sequences);
  for (std::size_t s = 0; s < spec.num_sequences; ++s) {
    Sequence seq{Mat(spec.T, spec.n_inputs), std::vector<std::size_t>(spec.T, 0)};
    std::vector<std::size_t> symbols(spec.T);
    for (std::size_t t = 0; t < spec.T; ++t) {
      symbols[t] = symbol(rng);
      seq.frames(t, symbols[t]) = 1.0;
    }
    for (std::size_t t = spec.context_span; t < spec.T; ++t) seq.labels[t] = symbols[t - spec.context_span];
    add_noise(seq.frames, spec.noise_std, rng);
    data.push_back(std::move(seq));
  }
  return data;
}

std::vector<Sequence> generate(const SynthSpec& spec) {
  return spec.task == SynthTask::context_window ? gen_context_window(spec) : gen_delayed_copy(spec);
}

Evaluation evaluate(const ModelParams& params, const ArmaConfig& cfg,
                    std::span<const Sequence> data) {
  Evaluation ev;
  if (data.empty()) return ev;
  std::size_t wrong = 0;
  std::size_t frames = 0;
  double cost_sum = 0.0;
  for (const auto& seq : data) {
    const ForwardTrace tr = forward(params, seq, cfg);
    cost_sum += cost(tr, seq, cfg.head);
    for (std::size_t t = 0; t < seq.length(); ++t) {
      if (argmax(tr.y.row(t)) != seq.labels[t]) ++wrong;
    }
    frames += seq.length();
  }
  ev.mean_cost = cost_sum / static_cast<double>(data.size());
  ev.frame_error = static_cast<double>(wrong) / static_cast<double>(frames);
  return ev;
}

double frame_error(const ModelParams& params, const ArmaConfig& cfg,
                   std::span<const Sequence> data) {
  return evaluate(params, cfg, data).frame_error;
}

}  // namespace esrnn
