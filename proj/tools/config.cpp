#include "config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace esrnn::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  const double v = parse_number<double>(key, value);
  if (!std::isfinite(v)) throw ConfigError("non-finite value for key '" + key + "'");
  return v;
}

template <class E>
E parse_enum(const std::string& key, const std::string& value,
             std::initializer_list<std::pair<const char*, E>> choices) {
  std::string allowed;
  for (const auto& [name, e] : choices) {
    if (value == name) return e;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError("invalid value '" + value + "' for key '" + key + "' (expected one of " + allowed + ")");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& schema() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"hidden", [](RunConfig& c, const std::string& k, const std::string& v) { c.hidden = parse_number<std::size_t>(k, v); }},
      {"delta1", [](RunConfig& c, const std::string& k, const std::string& v) { c.arma.delta1 = parse_number<std::size_t>(k, v); }},
      {"delta2", [](RunConfig& c, const std::string& k, const std::string& v) { c.arma.delta2 = parse_number<std::size_t>(k, v); }},
      {"nonlin", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.arma.nonlin = parse_enum<Nonlinearity>(k, v, {{"sigmoid", Nonlinearity::sigmoid}, {"tanh", Nonlinearity::tanh}});
       }},
      {"head", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.arma.head = parse_enum<OutputHead>(k, v, {{"softmax", OutputHead::softmax}, {"linear", OutputHead::linear}});
       }},
      {"optimizer", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.optimizer = parse_enum<Optimizer>(k, v, {{"primal_dual", Optimizer::primal_dual}, {"clipping", Optimizer::clipping}});
       }},
      {"mu0", [](RunConfig& c, const std::string& k, const std::string& v) { c.mu0 = parse_real(k, v); }},
      {"schedule", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.schedule = parse_enum<StepSchedule>(k, v, {{"constant", StepSchedule::constant}, {"inv_sqrt_k", StepSchedule::inv_sqrt_k}});
       }},
      {"momentum", [](RunConfig& c, const std::string& k, const std::string& v) { c.momentum = parse_real(k, v); }},
      {"dual_mu_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.dual_mu_scale = parse_real(k, v); }},
      {"variant", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.variant = parse_enum<PdVariant>(k, v, {{"shrinkage", PdVariant::shrinkage}, {"project_rows", PdVariant::project_rows}});
       }},
      {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.epochs = parse_number<std::size_t>(k, v); }},
      {"batch", [](RunConfig& c, const std::string& k, const std::string& v) { c.batch = parse_number<std::size_t>(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"clip_threshold", [](RunConfig& c, const std::string& k, const std::string& v) { c.clip_thresholds = {parse_real(k, v)}; }},
      {"clip_thresholds", [](RunConfig& c, const std::string& k, const std::string& v) { c.clip_thresholds = parse_list(k, v); }},
      {"manifest", [](RunConfig& c, const std::string&, const std::string& v) { c.manifest = v; }},
      {"synth_task", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synth.task = parse_enum<SynthTask>(k, v, {{"context_window", SynthTask::context_window}, {"delayed_copy", SynthTask::delayed_copy}});
       }},
      {"synth_T", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.T = parse_number<std::size_t>(k, v); }},
      {"synth_num_sequences", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.num_sequences = parse_number<std::size_t>(k, v); }},
      {"synth_n_inputs", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.n_inputs = parse_number<std::size_t>(k, v); }},
      {"synth_n_outputs", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.n_outputs = parse_number<std::size_t>(k, v); }},
      {"synth_context_span", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.context_span = parse_number<std::size_t>(k, v); }},
      {"synth_noise_std", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.noise_std = parse_real(k, v); }},
      {"synth_seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synth.seed = parse_number<std::uint64_t>(k, v);
         c.synth_seed_set = true;
       }},
      {"checkpoint", [](RunConfig& c, const std::string&, const std::string& v) { c.checkpoint = v; }},
      {"report", [](RunConfig& c, const std::string&, const std::string& v) { c.report = v; }},
  };
  return table;
}

}  // namespace

PdConfig RunConfig::pd_config() const {
  PdConfig pd;
  pd.mu0 = mu0;
  pd.schedule = schedule;
  pd.momentum = momentum;
  pd.dual_mu_scale = dual_mu_scale;
  pd.variant = variant;
  pd.epochs = epochs;
  pd.batch = batch;
  pd.seed = seed;
  return pd;
}

ClipConfig RunConfig::clip_config(double threshold) const {
  ClipConfig c;
  c.threshold = threshold;
  c.mu0 = mu0;
  c.schedule = schedule;
  c.momentum = momentum;
  c.epochs = epochs;
  c.batch = batch;
  c.seed = seed;
  return c;
}

SynthSpec RunConfig::synth_spec() const {
  SynthSpec s = synth;
  if (!synth_seed_set) s.seed = seed;
  return s;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, setter] : schema()) {
    if (name == key) {
      setter(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      apply_override(cfg, t);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : schema()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

}  // namespace esrnn::cli
