#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "esrnn/gradients.hpp"
#include "esrnn/training.hpp"

namespace esrnn {

struct ClipConfig {
  double threshold = 1.0;
  double mu0 = 0.05;
  StepSchedule schedule = StepSchedule::constant;
  double momentum = 0.0;
  std::size_t epochs = 10;
  std::size_t batch = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ClipResult {
  GradSet grads;
  bool clipped = false;
};

/// Rescales all blocks by threshold / ||g|| when the global norm exceeds threshold.
ClipResult clip(const GradSet& grads, double threshold);

/// BPTT with global-norm gradient clipping; W is unconstrained.
TrainResult train_clipped(const ModelParams& init, std::span<const Sequence> data,
                          const ArmaConfig& cfg, const ClipConfig& clip_cfg);

}  // namespace esrnn
