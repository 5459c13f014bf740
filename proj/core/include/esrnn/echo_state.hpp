#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "esrnn/model.hpp"

namespace esrnn {

struct SufficientConditionReport {
  double inf_norm = 0.0;
  double bound = 0.0;  // 1/gamma
  bool holds = false;  // inf_norm < bound
};

/// ||W||_inf < 1/gamma guarantees the state-contracting (echo-state) property.
SufficientConditionReport check_sufficient(const ModelParams& params, const ArmaConfig& cfg);

/// Absolute slack used when comparing simulated gaps against the bound.
inline constexpr double kContractionSlack = 1e-12;

struct ContractionReport {
  std::size_t t_steps = 0;
  double initial_gap = 0.0;
  std::vector<double> per_step_gap;    // ||h_t - h'_t||_inf, t = 1..T
  std::vector<double> per_step_bound;  // (gamma ||W||_inf)^t ||h_0 - h'_0||_inf
  bool satisfied = false;
};

/// Drives two copies of the network with the same inputs from h0 and h0p
/// and compares their distance with the geometric contraction bound.
ContractionReport verify_contraction(const ModelParams& params, const ArmaConfig& cfg,
                                     const Sequence& seq, const Vec& h0, const Vec& h0p);

/// W scaled so that ||W||_inf == target.
Mat scale_to_inf_norm(const Mat& w, double target);

/// Fraction of 1/gamma that freshly initialized recurrent weights sit at.
inline constexpr double kInitInfNormFraction = 0.9;

/// Feasible starting point: W ~ U[-1,1] rescaled to 0.9/gamma, Wi and U
/// ~ U[-r, r] with r = 1/sqrt(fan_in), b = 0.
ModelParams init_params(std::size_t hidden, std::size_t inputs_eff, std::size_t outputs,
                        const ArmaConfig& cfg, std::mt19937_64& rng);

}  // namespace esrnn
