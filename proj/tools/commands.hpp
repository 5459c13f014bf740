#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "esrnn/tasks.hpp"

namespace esrnn::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct TrainArgs {
  std::filesystem::path config;
  std::vector<std::string> overrides;  // key=value, applied after the file
};

struct EvalArgs {
  std::filesystem::path model;
  std::filesystem::path data;  // manifest
};

struct GradcheckArgs {
  std::uint64_t seed = 1;
  std::size_t seeds = 3;
  std::size_t hidden = 6;
  std::size_t steps = 12;
  bool perturb = false;  // corrupt one backprop entry to exercise the failure path
};

struct ContractionArgs {
  std::filesystem::path model;
  std::size_t steps = 100;
  std::uint64_t seed = 1;
};

struct GenSynthArgs {
  SynthSpec spec;
  std::filesystem::path out_dir;
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_contraction(const ContractionArgs& args, std::ostream& out, std::ostream& err);
int cmd_gen_synth(const GenSynthArgs& args, std::ostream& out, std::ostream& err);

/// "frame_error=<value>" with six decimals, the line printed by eval.
std::string format_frame_error(double value);

/// Output path for one run of a threshold sweep: stem.clip<t>.ext.
std::filesystem::path sweep_path(const std::filesystem::path& base, double threshold);

}  // namespace esrnn::cli
