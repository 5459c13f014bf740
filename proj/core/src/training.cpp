#include "esrnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "esrnn/error.hpp"
#include "esrnn/tasks.hpp"
#include "training_loop.hpp"

namespace esrnn {

double step_size(double mu0, StepSchedule schedule, std::uint64_t k) {
  if (schedule == StepSchedule::constant) return mu0;
  return mu0 / std::sqrt(static_cast<double>(std::max<std::uint64_t>(k, 1)));
}

std::uint64_t stream_seed(std::uint64_t seed, RngStream stream) {
  // splitmix64 finalizer over seed and stream id.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream) {
  return std::mt19937_64(stream_seed(seed, stream));
}

std::vector<std::size_t> epoch_order(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

OptState OptState::start(ModelParams params) {
  params.validate();
  OptState s;
  s.dual = DualState::zeros(params.hidden());
  s.velocity = GradSet::zeros_like(params);
  s.params = std::move(params);
  return s;
}

bool TrainReport::same_trajectory(const TrainReport& o) const {
  return epoch == o.epoch && mean_cost == o.mean_cost && frame_error == o.frame_error &&
         inf_norm_W == o.inf_norm_W && max_lambda == o.max_lambda &&
         mean_lambda == o.mean_lambda && clip_events == o.clip_events;
}

ModelParams lookahead(const ModelParams& params, const GradSet& velocity, double momentum) {
  ModelParams out = params;
  auto shift = [momentum](std::span<double> x, std::span<const double> v) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += momentum * v[i];
  };
  shift(out.W.data(), velocity.dW.data());
  shift(out.Wi.data(), velocity.dWi.data());
  shift(out.U.data(), velocity.dU.data());
  shift(out.b.span(), velocity.db.span());
  return out;
}

namespace detail {

void momentum_step(std::span<double> param, std::span<double> velocity,
                   std::span<const double> grad, double mu, double momentum) {
  if (momentum == 0.0) {
    for (std::size_t i = 0; i < param.size(); ++i) param[i] = param[i] - mu * grad[i];
    return;
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] - mu * grad[i];
    param[i] += velocity[i];
  }
}

void check_finite(const ModelParams& p, std::uint64_t k) {
  if (!all_finite(p.W.data()) || !all_finite(p.Wi.data()) || !all_finite(p.U.data()) ||
      !all_finite(p.b.span())) {
    throw NumericError("non-finite parameter after update at iteration " + std::to_string(k));
  }
}

std::vector<TrainReport> run_epochs(OptState& state, std::span<const Sequence> data,
                                    const ArmaConfig& cfg, const LoopSettings& settings,
                                    const UpdateFn& update) {
  if (data.empty()) throw UsageError("train: empty dataset");
  if (!(settings.mu0 > 0.0)) throw UsageError("train: mu0 must be positive");
  if (settings.batch == 0) throw UsageError("train: batch must be at least 1");
  if (settings.momentum < 0.0 || settings.momentum >= 1.0) {
    throw UsageError("train: momentum must lie in [0, 1)");
  }
  for (const auto& seq : data) {
    seq.validate(state.params.outputs());
    if (cfg.augmented_inputs(seq.input_dim()) != state.params.inputs_eff()) {
      throw UsageError("train: sequence input width " + std::to_string(seq.input_dim()) +
                       " does not match Wi columns " + std::to_string(state.params.inputs_eff()));
    }
  }

  auto rng = make_rng(settings.seed, RngStream::shuffle);
  std::vector<TrainReport> reports;
  reports.reserve(settings.epochs);

  for (std::size_t epoch = 1; epoch <= settings.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochTally tally;
    const auto order = epoch_order(data.size(), rng);

    for (std::size_t first = 0; first < order.size(); first += settings.batch) {
      const std::size_t last = std::min(order.size(), first + settings.batch);
      const double mu = step_size(settings.mu0, settings.schedule, state.k + 1);
      const ModelParams ahead = settings.momentum > 0.0
                                    ? lookahead(state.params, state.velocity, settings.momentum)
                                    : ModelParams{};
      const ModelParams& at = settings.momentum > 0.0 ? ahead : state.params;

      GradSet grads = gradient(at, cfg, data[order[first]]);
      for (std::size_t i = first + 1; i < last; ++i) grads.accumulate(gradient(at, cfg, data[order[i]]));
      if (last - first > 1) grads.scale(1.0 / static_cast<double>(last - first));

      update(state, grads, mu, tally);
    }

    const Evaluation ev = evaluate(state.params, cfg, data);
    TrainReport r;
    r.epoch = epoch;
    r.mean_cost = ev.mean_cost;
    r.frame_error = ev.frame_error;
    r.inf_norm_W = inf_norm(state.params.W);
    const auto& lam = state.dual.lambda;
    if (!lam.empty()) {
      r.max_lambda = *std::max_element(lam.begin(), lam.end());
      r.mean_lambda = std::accumulate(lam.begin(), lam.end(), 0.0) / static_cast<double>(lam.size());
    }
    r.clip_events = tally.clip_events;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    reports.push_back(r);
  }
  return reports;
}

}  // namespace detail
}  // namespace esrnn
