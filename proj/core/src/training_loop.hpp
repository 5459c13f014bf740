#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "esrnn/training.hpp"

namespace esrnn::detail {

struct LoopSettings {
  double mu0 = 0.05;
  StepSchedule schedule = StepSchedule::constant;
  double momentum = 0.0;
  std::size_t epochs = 0;
  std::size_t batch = 1;
  std::uint64_t seed = 1;
};

struct EpochTally {
  std::size_t clip_events = 0;
};

/// Applies one optimizer update given the batch gradient and step size.
using UpdateFn = std::function<void(OptState&, const GradSet&, double, EpochTally&)>;

/// Shared epoch/batch driver: seeded shuffle per epoch, Nesterov look-ahead
/// gradient when momentum > 0, one TrainReport per epoch.
std::vector<TrainReport> run_epochs(OptState& state, std::span<const Sequence> data,
                                    const ArmaConfig& cfg, const LoopSettings& settings,
                                    const UpdateFn& update);

/// velocity = momentum * velocity - mu * grad; returns the tentative value
/// param + velocity. With momentum == 0 this is exactly param - mu * grad.
void momentum_step(std::span<double> param, std::span<double> velocity,
                   std::span<const double> grad, double mu, double momentum);

void check_finite(const ModelParams& params, std::uint64_t k);

}  // namespace esrnn::detail
