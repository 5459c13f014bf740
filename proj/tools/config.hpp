#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esrnn/clipping.hpp"
#include "esrnn/model.hpp"
#include "esrnn/primal_dual.hpp"
#include "esrnn/tasks.hpp"

namespace esrnn::cli {

/// Bad configuration text: unknown key, unparsable value, missing file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Optimizer { primal_dual, clipping };

/// Everything `esrnn train` needs. Parsed from `key = value` lines; keys
/// outside this schema are rejected.
struct RunConfig {
  std::size_t hidden = 32;
  ArmaConfig arma;
  Optimizer optimizer = Optimizer::primal_dual;

  double mu0 = 0.05;
  StepSchedule schedule = StepSchedule::constant;
  double momentum = 0.0;
  double dual_mu_scale = 1.0;
  PdVariant variant = PdVariant::shrinkage;
  std::size_t epochs = 10;
  std::size_t batch = 1;
  std::uint64_t seed = 1;

  std::vector<double> clip_thresholds{1.0};

  // Data: a manifest, or a synthetic task when no manifest is given.
  std::optional<std::filesystem::path> manifest;
  SynthSpec synth;
  bool synth_seed_set = false;

  std::filesystem::path checkpoint = "model.ckpt";
  std::filesystem::path report = "report.csv";

  PdConfig pd_config() const;
  ClipConfig clip_config(double threshold) const;
  /// Synthetic task spec; its seed follows `seed` unless synth_seed was given.
  SynthSpec synth_spec() const;
};

/// Applies one `key=value` assignment.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses config text. Blank lines and lines starting with '#' are skipped.
/// `origin` names the source in error messages.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin);

/// Splits "key=value" and applies it.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Names accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace esrnn::cli
