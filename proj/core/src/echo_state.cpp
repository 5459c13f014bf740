#include "esrnn/echo_state.hpp"

#include <cmath>
#include <string>

#include "esrnn/error.hpp"

namespace esrnn {

SufficientConditionReport check_sufficient(const ModelParams& params, const ArmaConfig& cfg) {
  SufficientConditionReport r;
  r.inf_norm = inf_norm(params.W);
  r.bound = 1.0 / gamma_of(cfg.nonlin);
  r.holds = r.inf_norm < r.bound;
  return r;
}

ContractionReport verify_contraction(const ModelParams& params, const ArmaConfig& cfg,
                                     const Sequence& seq, const Vec& h0, const Vec& h0p) {
  if (h0.size() != h0p.size()) throw UsageError("verify_contraction: initial states differ in size");
  if (h0 == h0p) throw UsageError("verify_contraction: initial states must differ");

  const Mat inputs = augment_inputs(seq, cfg);
  const ForwardTrace a = forward_augmented(params, inputs, cfg, h0);
  const ForwardTrace b = forward_augmented(params, inputs, cfg, h0p);

  ContractionReport r;
  r.t_steps = seq.length();
  for (std::size_t i = 0; i < h0.size(); ++i) r.initial_gap = std::max(r.initial_gap, std::abs(h0[i] - h0p[i]));
  const double rate = gamma_of(cfg.nonlin) * inf_norm(params.W);

  r.per_step_gap.reserve(r.t_steps);
  r.per_step_bound.reserve(r.t_steps);
  r.satisfied = true;
  double factor = 1.0;
  for (std::size_t t = 0; t < r.t_steps; ++t) {
    const auto ha = a.h.row(t);
    const auto hb = b.h.row(t);
    double gap = 0.0;
    for (std::size_t i = 0; i < ha.size(); ++i) gap = std::max(gap, std::abs(ha[i] - hb[i]));
    factor *= rate;
    const double bound = factor * r.initial_gap;
    r.per_step_gap.push_back(gap);
    r.per_step_bound.push_back(bound);
    if (!(gap <= bound + kContractionSlack)) r.satisfied = false;
  }
  return r;
}

Mat scale_to_inf_norm(const Mat& w, double target) {
  if (!(target > 0.0)) throw UsageError("scale_to_inf_norm: target must be positive");
  const double norm = inf_norm(w);
  if (norm == 0.0) throw UsageError("scale_to_inf_norm: zero matrix cannot be rescaled");
  const double factor = target / norm;
  Mat out = w;
  for (double& v : out.data()) v *= factor;
  return out;
}

ModelParams init_params(std::size_t hidden, std::size_t inputs_eff, std::size_t outputs,
                        const ArmaConfig& cfg, std::mt19937_64& rng) {
  if (hidden == 0 || inputs_eff == 0 || outputs == 0) {
    throw UsageError("init_params: dimensions must be positive");
  }
  ModelParams p = ModelParams::zeros(hidden, inputs_eff, outputs);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (double& v : p.W.data()) v = unit(rng);
  p.W = scale_to_inf_norm(p.W, kInitInfNormFraction / gamma_of(cfg.nonlin));

  const double ri = 1.0 / std::sqrt(static_cast<double>(inputs_eff));
  for (double& v : p.Wi.data()) v = ri * unit(rng);
  const double ru = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : p.U.data()) v = ru * unit(rng);
  return p;
}

}  // namespace esrnn
