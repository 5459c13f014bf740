#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "esrnn/gradients.hpp"
#include "esrnn/model.hpp"
#include "esrnn/training.hpp"

namespace esrnn {

enum class PdVariant {
  shrinkage,     // soft-threshold W with per-row multipliers, projected dual ascent
  project_rows,  // project each row of W onto the l1 ball after the step
};

struct PdConfig {
  double mu0 = 0.05;
  StepSchedule schedule = StepSchedule::constant;
  double momentum = 0.0;       // Nesterov coefficient, 0 disables
  double dual_mu_scale = 1.0;  // dual step = mu_k * dual_mu_scale
  PdVariant variant = PdVariant::shrinkage;
  std::size_t epochs = 10;
  std::size_t batch = 1;
  std::uint64_t seed = 1;
  bool freeze_dual = false;  // keep lambda at its initial value

  void validate() const;
};

/// Entrywise soft-thresholding of X with threshold lambda_i * mu on row i.
Mat shrink(const Mat& x, const Vec& lambda, double mu);

/// One primal update. `grads` must be taken at the look-ahead point when
/// momentum > 0. W gets a gradient step followed by shrink; Wi, U and b
/// get plain steps. Increments state.k.
OptState primal_step(OptState state, const GradSet& grads, double mu, double momentum = 0.0);

/// Same as primal_step but W is projected row-wise onto the l1 ball of
/// radius 1/gamma instead of being shrunk.
OptState primal_step_projected(OptState state, const GradSet& grads, double mu, double momentum,
                               double gamma);

/// Projected ascent on lambda from explicit row norms.
void dual_step(DualState& dual, std::span<const double> row_norms, double mu, double gamma);
/// Projected ascent on lambda using the row norms of the state's W.
OptState dual_step(OptState state, double mu, double gamma);

/// Euclidean projection of x onto {z : ||z||_1 <= radius}.
std::vector<double> project_l1_ball(std::span<const double> x, double radius);

/// Projects every row with ||w_i||_1 > 1/gamma onto the l1 ball of that radius.
Mat project_rows(const Mat& w, double gamma);

/// Snapshot handed to the observer after every dual update.
struct DualStepEvent {
  std::uint64_t k = 0;
  double mu = 0.0;     // dual step actually used
  double bound = 0.0;  // 1/gamma
  std::span<const double> row_norms;  // ||w_i||_1 fed to the update
  std::span<const double> lambda_before;
  std::span<const double> lambda_after;
};

using DualObserver = std::function<void(const DualStepEvent&)>;

/// Primal-dual training of the constrained problem
///   min J(W, Wi, U, b)  s.t.  ||w_i||_1 <= 1/gamma for every row i.
TrainResult train(const ModelParams& init, std::span<const Sequence> data, const ArmaConfig& cfg,
                  const PdConfig& pd, const DualObserver& observer = {});

}  // namespace esrnn
