#include "esrnn/clipping.hpp"

#include "esrnn/error.hpp"
#include "training_loop.hpp"

namespace esrnn {

void ClipConfig::validate() const {
  if (!(threshold > 0.0)) throw UsageError("ClipConfig: threshold must be positive");
  if (!(mu0 > 0.0)) throw UsageError("ClipConfig: mu0 must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw UsageError("ClipConfig: momentum must lie in [0, 1)");
  if (batch == 0) throw UsageError("ClipConfig: batch must be at least 1");
}

ClipResult clip(const GradSet& grads, double threshold) {
  if (!(threshold > 0.0)) throw UsageError("clip: threshold must be positive");
  ClipResult out{grads, false};
  const double g = grads.norm();
  if (g > threshold) {
    out.grads.scale(threshold / g);
    out.clipped = true;
  }
  return out;
}

TrainResult train_clipped(const ModelParams& init, std::span<const Sequence> data,
                          const ArmaConfig& cfg, const ClipConfig& clip_cfg) {
  clip_cfg.validate();
  init.validate();
  OptState state = OptState::start(init);

  detail::LoopSettings settings{clip_cfg.mu0,    clip_cfg.schedule, clip_cfg.momentum,
                                clip_cfg.epochs, clip_cfg.batch,    clip_cfg.seed};

  auto update = [&](OptState& s, const GradSet& grads, double mu, detail::EpochTally& tally) {
    const ClipResult c = clip(grads, clip_cfg.threshold);
    if (c.clipped) ++tally.clip_events;
    ++s.k;
    detail::momentum_step(s.params.W.data(), s.velocity.dW.data(), c.grads.dW.data(), mu, clip_cfg.momentum);
    detail::momentum_step(s.params.Wi.data(), s.velocity.dWi.data(), c.grads.dWi.data(), mu, clip_cfg.momentum);
    detail::momentum_step(s.params.U.data(), s.velocity.dU.data(), c.grads.dU.data(), mu, clip_cfg.momentum);
    detail::momentum_step(s.params.b.span(), s.velocity.db.span(), c.grads.db.span(), mu, clip_cfg.momentum);
    detail::check_finite(s.params, s.k);
  };

  TrainResult result;
  result.reports = detail::run_epochs(state, data, cfg, settings, update);
  result.params = std::move(state.params);
  result.dual = std::move(state.dual);
  result.iterations = state.k;
  return result;
}

}  // namespace esrnn
