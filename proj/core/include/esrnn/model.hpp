#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "esrnn/numerics.hpp"

namespace esrnn {

enum class OutputHead { linear, softmax };

/// Window orders of the moving-average input part and the unit types.
///
/// `delta1` is the number of future frames the network looks ahead,
/// `delta2` the number of past frames it looks back. Both zero gives the
/// plain autoregressive network.
struct ArmaConfig {
  std::size_t delta1 = 0;
  std::size_t delta2 = 0;
  Nonlinearity nonlin = Nonlinearity::sigmoid;
  OutputHead head = OutputHead::softmax;

  std::size_t window() const noexcept { return delta1 + delta2 + 1; }
  std::size_t augmented_inputs(std::size_t n_inputs) const noexcept { return window() * n_inputs; }

  friend bool operator==(const ArmaConfig&, const ArmaConfig&) = default;
};

/// Trainable parameters {W, Wi, U, b}.
///
/// Wi is the augmented input matrix: column block k multiplies frame
/// t - delta2 + k.
struct ModelParams {
  Mat W;   // N x N
  Mat Wi;  // N x N_I_eff
  Mat U;   // N_o x N
  Vec b;   // N

  static ModelParams zeros(std::size_t hidden, std::size_t inputs_eff, std::size_t outputs);

  std::size_t hidden() const noexcept { return W.rows(); }
  std::size_t inputs_eff() const noexcept { return Wi.cols(); }
  std::size_t outputs() const noexcept { return U.rows(); }

  /// Throws UsageError unless the four blocks have consistent shapes.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// One utterance: T input frames and one class label per frame.
struct Sequence {
  Mat frames;                        // T x N_I
  std::vector<std::size_t> labels;   // T

  std::size_t length() const noexcept { return frames.rows(); }
  std::size_t input_dim() const noexcept { return frames.cols(); }

  /// Throws UsageError unless T >= 1, labels match T and lie in [0, n_classes).
  void validate(std::size_t n_classes) const;
};

struct ForwardTrace {
  Mat p;   // T x N pre-activations
  Mat h;   // T x N hidden states
  Mat y;   // T x N_o outputs
  Vec h0;  // initial state

  std::size_t length() const noexcept { return p.rows(); }
  /// h_{t-1} for 0-based t (h0 when t == 0).
  std::span<const double> previous_state(std::size_t t) const {
    return t == 0 ? h0.span() : h.row(t - 1);
  }
};

/// Row t holds frames t - delta2 ... t + delta1 concatenated in time order;
/// frames outside [0, T) are zero.
Mat augment_inputs(const Mat& frames, const ArmaConfig& cfg);
inline Mat augment_inputs(const Sequence& seq, const ArmaConfig& cfg) {
  return augment_inputs(seq.frames, cfg);
}

/// Runs the network over already-augmented inputs.
ForwardTrace forward_augmented(const ModelParams& params, const Mat& augmented,
                               const ArmaConfig& cfg, const Vec& h0);

/// Runs the network from h0 (zero vector when omitted).
ForwardTrace forward(const ModelParams& params, const Sequence& seq, const ArmaConfig& cfg,
                     const Vec& h0);
ForwardTrace forward(const ModelParams& params, const Sequence& seq, const ArmaConfig& cfg);

/// Output nonlinearity g applied to z = U h.
Vec apply_head(OutputHead head, const Vec& z);

struct CostBreakdown {
  double value = 0.0;
  std::size_t clamp_events = 0;  // outputs clamped to 1e-300 before ln
};

/// Time-averaged cost of a trace against one-hot targets built from labels.
CostBreakdown cost_breakdown(const ForwardTrace& trace, const Sequence& seq, OutputHead head);
double cost(const ForwardTrace& trace, const Sequence& seq, OutputHead head);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> x);

}  // namespace esrnn
