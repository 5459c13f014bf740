#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "esrnn/model.hpp"

namespace esrnn {

enum class SynthTask { context_window, delayed_copy };

struct SynthSpec {
  SynthTask task = SynthTask::context_window;
  std::size_t T = 100;
  std::size_t num_sequences = 50;
  std::size_t n_inputs = 4;
  std::size_t n_outputs = 4;
  std::size_t context_span = 2;  // window half-width, or the delay for delayed_copy
  double noise_std = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Per-offset projection vectors of the context-window labeler, offsets
/// -span..span in increasing order, each of length n_inputs.
std::vector<Vec> context_window_weights(const SynthSpec& spec);

/// Standard-normal quantiles at i / n_classes, i = 1..n_classes-1.
std::vector<double> class_thresholds(std::size_t n_classes);

/// Class of a scalar score: the number of thresholds it reaches.
std::size_t quantize_score(double score, std::span<const double> thresholds);

/// Frames ~ N(0, 1); the label at t quantizes a fixed linear score of the
/// clean frames t - span .. t + span (zero outside the sequence). The
/// returned frames carry additive N(0, noise_std^2) noise.
std::vector<Sequence> gen_context_window(const SynthSpec& spec);

/// One-hot symbols in [0, n_outputs) (n_inputs >= n_outputs) plus noise;
/// the label at t is the symbol at t - delay, class 0 before that.
std::vector<Sequence> gen_delayed_copy(const SynthSpec& spec);

std::vector<Sequence> generate(const SynthSpec& spec);

struct Evaluation {
  double mean_cost = 0.0;    // average of per-sequence costs
  double frame_error = 0.0;  // pooled over all frames
};

/// Forward pass from a zero state over every sequence.
Evaluation evaluate(const ModelParams& params, const ArmaConfig& cfg,
                    std::span<const Sequence> data);

/// Fraction of frames whose argmax output differs from the label, pooled
/// over all frames of all sequences.
double frame_error(const ModelParams& params, const ArmaConfig& cfg,
                   std::span<const Sequence> data);

}  // namespace esrnn
