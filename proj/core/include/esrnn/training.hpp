#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "esrnn/gradients.hpp"
#include "esrnn/model.hpp"

namespace esrnn {

enum class StepSchedule { constant, inv_sqrt_k };

/// mu0, or mu0 / sqrt(k) for the decaying schedule (k >= 1).
double step_size(double mu0, StepSchedule schedule, std::uint64_t k);

/// Independent RNG streams derived from one run seed.
enum class RngStream : std::uint64_t { init = 1, shuffle = 2, synth = 3, probe = 4 };

std::uint64_t stream_seed(std::uint64_t seed, RngStream stream);
std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream);

/// Visiting order for one epoch: a permutation of 0..n-1 drawn from rng.
std::vector<std::size_t> epoch_order(std::size_t n, std::mt19937_64& rng);

/// Lagrange multipliers, one per row of W. Never negative.
struct DualState {
  Vec lambda;

  static DualState zeros(std::size_t n) { return {Vec(n, 0.0)}; }
  friend bool operator==(const DualState&, const DualState&) = default;
};

struct OptState {
  ModelParams params;
  DualState dual;
  GradSet velocity;
  std::uint64_t k = 0;

  /// Fresh state: zero multipliers, zero velocity, k = 0.
  static OptState start(ModelParams params);
};

struct TrainReport {
  std::size_t epoch = 0;
  double mean_cost = 0.0;
  double frame_error = 0.0;
  double inf_norm_W = 0.0;
  double max_lambda = 0.0;
  double mean_lambda = 0.0;
  std::size_t clip_events = 0;
  double wall_ms = 0.0;

  /// Equality on every field except wall-clock time.
  bool same_trajectory(const TrainReport& other) const;
};

struct TrainResult {
  ModelParams params;
  DualState dual;
  std::uint64_t iterations = 0;
  std::vector<TrainReport> reports;
};

/// params + momentum * velocity, the Nesterov look-ahead point.
ModelParams lookahead(const ModelParams& params, const GradSet& velocity, double momentum);

}  // namespace esrnn
