#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "config.hpp"

using namespace esrnn;
using namespace esrnn::cli;

int main(int argc, char** argv) {
  CLI::App app{"Echo-state constrained ARMA recurrent networks"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model from a key=value config file");
  train->add_option("config", train_args.config, "Config file")->required();
  train->add_option("--set", train_args.overrides, "Override one key (key=value); repeatable");
  std::string keys;
  for (const auto& k : config_keys()) keys += (keys.empty() ? "" : ", ") + k;
  train->footer("Config keys: " + keys);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Frame error of a checkpoint on a dataset");
  eval->add_option("model", eval_args.model, "Checkpoint file")->required();
  eval->add_option("data", eval_args.data, "Dataset manifest")->required();

  GradcheckArgs grad_args;
  auto* grad = app.add_subcommand("gradcheck", "Compare BPTT gradients with central differences");
  grad->add_option("--seed", grad_args.seed, "First seed");
  grad->add_option("--seeds", grad_args.seeds, "Seeds per configuration");
  grad->add_option("--hidden", grad_args.hidden, "Hidden units");
  grad->add_option("--steps", grad_args.steps, "Sequence length");
  grad->add_flag("--perturb", grad_args.perturb, "Corrupt one gradient entry (harness check)");

  ContractionArgs con_args;
  auto* con = app.add_subcommand("contraction", "Check the state-contraction bound of a checkpoint");
  con->add_option("model", con_args.model, "Checkpoint file")->required();
  con->add_option("--steps", con_args.steps, "Number of time steps");
  con->add_option("--seed", con_args.seed, "Seed for inputs and initial states");

  GenSynthArgs gen_args;
  std::string task = "context_window";
  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic dataset and its manifest");
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--task", task, "context_window or delayed_copy")
      ->check(CLI::IsMember({"context_window", "delayed_copy"}));
  gen->add_option("--T", gen_args.spec.T, "Frames per sequence");
  gen->add_option("--num-sequences", gen_args.spec.num_sequences, "Number of sequences");
  gen->add_option("--n-inputs", gen_args.spec.n_inputs, "Input dimension");
  gen->add_option("--n-outputs", gen_args.spec.n_outputs, "Number of classes");
  gen->add_option("--context-span", gen_args.spec.context_span, "Window half-width or copy delay");
  gen->add_option("--noise-std", gen_args.spec.noise_std, "Additive input noise");
  gen->add_option("--seed", gen_args.spec.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*train) return cmd_train(train_args, std::cout, std::cerr);
  if (*eval) return cmd_eval(eval_args, std::cout, std::cerr);
  if (*grad) return cmd_gradcheck(grad_args, std::cout, std::cerr);
  if (*con) return cmd_contraction(con_args, std::cout, std::cerr);
  gen_args.spec.task = task == "delayed_copy" ? SynthTask::delayed_copy : SynthTask::context_window;
  return cmd_gen_synth(gen_args, std::cout, std::cerr);
}
