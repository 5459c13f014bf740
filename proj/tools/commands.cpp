#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "config.hpp"
#include "esrnn/clipping.hpp"
#include "esrnn/data_io.hpp"
#include "esrnn/echo_state.hpp"
#include "esrnn/error.hpp"
#include "esrnn/gradients.hpp"
#include "esrnn/primal_dual.hpp"

namespace esrnn::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kGradTolerance = 1e-6;
constexpr double kGradFloor = 1e-3;
constexpr double kProbeEps = 1e-5;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const char* name_of(Nonlinearity n) { return n == Nonlinearity::sigmoid ? "sigmoid" : "tanh"; }
const char* name_of(OutputHead h) { return h == OutputHead::softmax ? "softmax" : "linear"; }

// Runs `body`, mapping library exceptions onto the exit-code contract.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NumericError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

struct Dataset {
  std::vector<Sequence> sequences;
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
};

Dataset load_data(const RunConfig& cfg) {
  Dataset d;
  if (cfg.manifest) {
    const Manifest m = load_manifest(*cfg.manifest);
    d.sequences = load_dataset(m);
    d.n_inputs = m.n_inputs;
    d.n_outputs = m.n_outputs;
  } else {
    const SynthSpec spec = cfg.synth_spec();
    d.sequences = generate(spec);
    d.n_inputs = spec.n_inputs;
    d.n_outputs = spec.n_outputs;
  }
  return d;
}

void summarize(std::ostream& out, const std::string& label, const TrainResult& r, const ArmaConfig& arma,
               std::span<const Sequence> data, const fs::path& ckpt, const fs::path& report) {
  const Evaluation ev = evaluate(r.params, arma, data);
  out << label << " iterations=" << r.iterations << " mean_cost=" << fmt("%.6f", ev.mean_cost) << ' '
      << format_frame_error(ev.frame_error) << " inf_norm_W=" << fmt("%.6f", inf_norm(r.params.W))
      << " checkpoint=" << ckpt.string() << " report=" << report.string() << '\n';
}

void save_run(const TrainResult& r, const RunConfig& cfg, std::size_t n_inputs, const fs::path& ckpt,
              const fs::path& report) {
  Checkpoint c;
  c.cfg = cfg.arma;
  c.n_inputs = n_inputs;
  c.params = r.params;
  c.lambda = r.dual.lambda;
  c.iteration = r.iterations;
  save_checkpoint(ckpt, c);
  write_report_log(report, r.reports);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_frame_error(double value) { return "frame_error=" + fmt("%.6f", value); }

fs::path sweep_path(const fs::path& base, double threshold) {
  fs::path p = base;
  p.replace_filename(base.stem().string() + ".clip" + fmt("%g", threshold) + base.extension().string());
  return p;
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg;
    apply_config_text(cfg, read_text(args.config), args.config.string());
    for (const auto& o : args.overrides) apply_override(cfg, o);

    const Dataset data = load_data(cfg);
    auto rng = make_rng(cfg.seed, RngStream::init);
    const ModelParams init =
        init_params(cfg.hidden, cfg.arma.augmented_inputs(data.n_inputs), data.n_outputs, cfg.arma, rng);

    if (cfg.optimizer == Optimizer::primal_dual) {
      const TrainResult r = train(init, data.sequences, cfg.arma, cfg.pd_config());
      save_run(r, cfg, data.n_inputs, cfg.checkpoint, cfg.report);
      summarize(out, "primal_dual", r, cfg.arma, data.sequences, cfg.checkpoint, cfg.report);
      return kExitOk;
    }

    const bool sweep = cfg.clip_thresholds.size() > 1;
    for (double threshold : cfg.clip_thresholds) {
      const fs::path ckpt = sweep ? sweep_path(cfg.checkpoint, threshold) : cfg.checkpoint;
      const fs::path report = sweep ? sweep_path(cfg.report, threshold) : cfg.report;
      const TrainResult r = train_clipped(init, data.sequences, cfg.arma, cfg.clip_config(threshold));
      save_run(r, cfg, data.n_inputs, ckpt, report);
      summarize(out, "clipping threshold=" + fmt("%g", threshold), r, cfg.arma, data.sequences, ckpt, report);
    }
    return kExitOk;
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint c = load_checkpoint(args.model);
    const Manifest m = load_manifest(args.data);
    if (m.n_inputs != c.n_inputs || m.n_outputs != c.params.outputs()) {
      err << "error: dimension mismatch: manifest " << args.data.string() << " declares n_inputs=" << m.n_inputs
          << " n_outputs=" << m.n_outputs << " but checkpoint " << args.model.string()
          << " has n_inputs=" << c.n_inputs << " n_outputs=" << c.params.outputs() << '\n';
      return kExitUsage;
    }
    const auto data = load_dataset(m);
    out << format_frame_error(frame_error(c.params, c.cfg, data)) << '\n';
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.seeds == 0 || args.hidden == 0 || args.steps == 0) {
      throw UsageError("gradcheck: seeds, hidden and steps must be positive");
    }
    constexpr std::size_t kInputs = 3;
    constexpr std::size_t kOutputs = 4;
    double worst = 0.0;
    std::size_t configs = 0;
    for (auto nonlin : {Nonlinearity::sigmoid, Nonlinearity::tanh}) {
      for (auto head : {OutputHead::softmax, OutputHead::linear}) {
        for (bool arma : {false, true}) {
          const ArmaConfig cfg{arma ? 2u : 0u, arma ? 3u : 0u, nonlin, head};
          for (std::size_t s = 0; s < args.seeds; ++s) {
            const std::uint64_t seed = args.seed + s;
            auto rng = make_rng(seed, RngStream::probe);
            std::uniform_real_distribution<double> weight(-0.5, 0.5);
            std::uniform_real_distribution<double> frame(-1.0, 1.0);
            std::uniform_int_distribution<std::size_t> label(0, kOutputs - 1);

            ModelParams p = ModelParams::zeros(args.hidden, cfg.augmented_inputs(kInputs), kOutputs);
            for (double& v : p.W.data()) v = weight(rng);
            for (double& v : p.Wi.data()) v = weight(rng);
            for (double& v : p.U.data()) v = weight(rng);
            for (double& v : p.b.span()) v = weight(rng);
            Sequence seq{Mat(args.steps, kInputs), std::vector<std::size_t>(args.steps)};
            for (double& v : seq.frames.data()) v = frame(rng);
            for (auto& l : seq.labels) l = label(rng);

            GradSet exact = gradient(p, cfg, seq);
            if (args.perturb) exact.dW(0, 0) += 1e-3;
            const double e = max_relative_error(exact, finite_diff(p, cfg, seq, kProbeEps), kGradFloor);
            worst = std::max(worst, e);
            ++configs;
            out << name_of(nonlin) << ' ' << name_of(head) << ' ' << (arma ? "arma(2,3)" : "ar") << " seed=" << seed
                << " max_rel_err=" << fmt("%.3e", e) << '\n';
          }
        }
      }
    }
    const bool ok = worst < kGradTolerance;
    out << "configs=" << configs << " max_relative_error=" << fmt("%.3e", worst) << " tolerance="
        << fmt("%.0e", kGradTolerance) << ' ' << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kExitOk : kExitCheckFailed;
  });
}

int cmd_contraction(const ContractionArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint c = load_checkpoint(args.model);
    const SufficientConditionReport cond = check_sufficient(c.params, c.cfg);
    out << "inf_norm_W=" << fmt("%.9g", cond.inf_norm) << " bound=" << fmt("%.9g", cond.bound) << '\n';
    if (!cond.holds) out << "condition not met - bound not applicable\n";
    out << "t gap bound\n";
    if (args.steps == 0) {
      if (cond.holds) out << "satisfied=true\n";
      return kExitOk;
    }

    auto rng = make_rng(args.seed, RngStream::probe);
    std::normal_distribution<double> unit(0.0, 1.0);
    Sequence seq{Mat(args.steps, c.n_inputs), std::vector<std::size_t>(args.steps, 0)};
    for (double& v : seq.frames.data()) v = unit(rng);
    const double lo = c.cfg.nonlin == Nonlinearity::sigmoid ? 0.0 : -1.0;
    std::uniform_real_distribution<double> state(lo, 1.0);
    const std::size_t n = c.params.hidden();
    Vec h0(n);
    Vec h0p(n);
    do {
      for (double& v : h0) v = state(rng);
      for (double& v : h0p) v = state(rng);
    } while (h0 == h0p);

    const ContractionReport r = verify_contraction(c.params, c.cfg, seq, h0, h0p);
    for (std::size_t t = 0; t < r.t_steps; ++t) {
      out << t + 1 << ' ' << fmt("%.6e", r.per_step_gap[t]) << ' '
          << (cond.holds ? fmt("%.6e", r.per_step_bound[t]) : std::string("-")) << '\n';
    }
    if (!cond.holds) return kExitOk;
    out << "satisfied=" << (r.satisfied ? "true" : "false") << '\n';
    return r.satisfied ? kExitOk : kExitCheckFailed;
  });
}

int cmd_gen_synth(const GenSynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto data = generate(args.spec);
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec || !fs::is_directory(args.out_dir)) {
      throw std::runtime_error("cannot create output directory " + args.out_dir.string() +
                               (ec ? ": " + ec.message() : std::string()));
    }
    Manifest m;
    m.n_inputs = args.spec.n_inputs;
    m.n_outputs = args.spec.n_outputs;
    for (std::size_t i = 0; i < data.size(); ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "seq%04zu", i);
      const std::string feat = std::string(stem) + ".feat";
      const std::string lab = std::string(stem) + ".lab";
      save_sequence(args.out_dir / feat, args.out_dir / lab, data[i]);
      m.entries.push_back({feat, lab});
    }
    save_manifest(args.out_dir / "manifest.txt", m);
    out << "wrote " << data.size() << " sequences and manifest.txt to " << args.out_dir.string() << '\n';
    return kExitOk;
  });
}

}  // namespace esrnn::cli
