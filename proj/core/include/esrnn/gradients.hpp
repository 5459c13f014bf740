#pragma once

#include <cstddef>
#include <span>

#include "esrnn/model.hpp"

namespace esrnn {

/// Gradient blocks shaped like ModelParams.
struct GradSet {
  Mat dW;
  Mat dWi;
  Mat dU;
  Vec db;

  static GradSet zeros_like(const ModelParams& params);

  /// Global 2-norm over every entry of every block.
  double norm() const;
  void scale(double factor);
  /// this += other, entry by entry.
  void accumulate(const GradSet& other);

  friend bool operator==(const GradSet&, const GradSet&) = default;
};

struct BackpropResult {
  GradSet grads;
  Mat delta;  // T x N error signals
};

/// Full-sequence BPTT gradient of the time-averaged cost.
GradSet backprop(const ModelParams& params, const ArmaConfig& cfg, const Sequence& seq,
                 const ForwardTrace& trace);
BackpropResult backprop_with_deltas(const ModelParams& params, const ArmaConfig& cfg,
                                    const Sequence& seq, const ForwardTrace& trace);

/// Runs forward from a zero state and backprop in one call.
GradSet gradient(const ModelParams& params, const ArmaConfig& cfg, const Sequence& seq);

/// Uniform average of per-sequence gradients, reduced in index order.
GradSet batch_gradient(const ModelParams& params, const ArmaConfig& cfg,
                       std::span<const Sequence> batch);

/// Central-difference gradient, one full forward per probe.
GradSet finite_diff(const ModelParams& params, const ArmaConfig& cfg, const Sequence& seq,
                    double eps);

struct GradRegimeReport {
  double two_norm_W = 0.0;
  bool vanish_bound_holds = false;      // ||W||_2 < 1/gamma
  bool explode_necessary_holds = false; // ||W||_2 > 1/gamma
  std::size_t iterations = 0;
};

/// Largest singular value by power iteration on W^T W.
double spectral_norm(const Mat& w, double tol = 1e-10, std::size_t max_iter = 10000,
                     std::size_t* iterations = nullptr);

GradRegimeReport grad_regime_report(const ModelParams& params, const ArmaConfig& cfg);

/// Largest |a - b| / max(|a|, |b|, floor) over all entries.
double max_relative_error(const GradSet& a, const GradSet& b, double floor);

}  // namespace esrnn
