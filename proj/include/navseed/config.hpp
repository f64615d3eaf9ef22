#ifndef NAVSEED_CONFIG_HPP
#define NAVSEED_CONFIG_HPP

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "navseed/buffers.hpp"
#include "navseed/dwa.hpp"
#include "navseed/expert.hpp"
#include "navseed/maps.hpp"
#include "navseed/sim.hpp"

namespace navseed::cli {

/// Bad invocation (unknown key, malformed config); maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key set covering every tunable of the pipeline. Defaults marked
// "(paper)" come from the publication's stated values; the rest are project
// decisions and carry "(decided)" in their help text.
struct RunConfig {
  uint64_t seed = 0;
  std::string map = "corridor";
  int workers = 1;
  int episodes = 100;
  int64_t env_steps = 30000;
  int64_t steps = 20000;
  std::string algo = "td3";
  std::string mode = "pretrain_per";
  bool include_failures = false;

  drl::HyperParams hyper;
  sim::RewardParams reward;
  sim::EpisodeConfig episode;
  expert::ExpertConfig expert;

  std::string data_path;
  std::string init_path;
  std::string out_path;
  std::string log_path;
  std::string config_path;
};

inline sim::WorldMap resolve_map(const std::string& name_or_path) {
  if (name_or_path == "corridor" || name_or_path == "house" || name_or_path == "office" ||
      name_or_path == "maze")
    return sim::load_embedded_map(name_or_path);
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw std::runtime_error("map not found (embedded name or file path): " + name_or_path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sim::load_map(text);
}

namespace detail {

inline void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "master RNG seed (decided)")->capture_default_str();
  cmd->add_option("--workers", cfg.workers,
                  "parallel workers for dataset generation and evaluation (decided)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--config", cfg.config_path,
                  "flat key = value config file; defaults < file < flags");
}

inline void add_hyper(CLI::App* cmd, drl::HyperParams& hp) {
  cmd->add_option("--gamma", hp.gamma, "discount factor (paper: gamma)")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--tau", hp.tau, "target soft-update rate (paper: tau)")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--lr", hp.lr, "learning rate (paper: 3e-6, comparison table)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--batch", hp.batch_size, "minibatch size (paper: 256, comparison table)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--policy-delay", hp.policy_delay, "actor/target update cadence (paper: delta)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--td3-target-noise", hp.td3_target_noise,
                  "TD3 target smoothing sigma (decided)")->capture_default_str();
  cmd->add_option("--td3-noise-clip", hp.td3_noise_clip, "TD3 smoothing clip (decided)")
      ->capture_default_str();
  cmd->add_option("--exploration-noise", hp.exploration_noise,
                  "online Gaussian exploration sigma, DDPG/TD3 (decided)")->capture_default_str();
  cmd->add_option("--sac-alpha", hp.sac_alpha, "SAC entropy temperature (paper: alpha)")
      ->capture_default_str();
  cmd->add_option("--per-alpha", hp.per_alpha, "priority exponent (decided)")
      ->capture_default_str();
  cmd->add_option("--per-beta0", hp.per_beta0,
                  "initial importance-sampling beta, annealed to 1 (decided)")
      ->capture_default_str();
  cmd->add_option("--rho-start", hp.rho_start, "expert batch fraction at step 0 (decided)")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--rho-end", hp.rho_end, "expert batch fraction at budget end (decided)")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--buffer-capacity", hp.buffer_capacity, "online replay capacity (decided)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--sac-target-entropy-net", hp.sac_target_entropy_net,
                "sample SAC target values from the target policy network (decided)");
}

inline void add_reward(CLI::App* cmd, sim::RewardParams& rp) {
  cmd->add_option("--w-distance", rp.w_distance, "progress reward weight (decided)")
      ->capture_default_str();
  cmd->add_option("--r-c", rp.r_c, "collision-proximity penalty (decided)")->capture_default_str();
  cmd->add_option("--d-threshold", rp.d_threshold, "proximity threshold meters (decided)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--r-success", rp.r_success, "arrival reward (decided)")->capture_default_str();
  cmd->add_option("--r-fail", rp.r_fail, "collision reward (decided)")->capture_default_str();
  cmd->add_option("--v-slow", rp.v_slow, "slow-speed threshold m/s (paper: 0.1)")
      ->capture_default_str();
  cmd->add_option("--omega-limit", rp.omega_limit, "turn-rate threshold rad/s (paper: 0.5)")
      ->capture_default_str();
  cmd->add_option("--linear-penalty", rp.linear_penalty, "slow-speed penalty (paper: -4)")
      ->capture_default_str();
  cmd->add_option("--angular-penalty", rp.angular_penalty, "fast-turn penalty (paper: -1)")
      ->capture_default_str();
}

inline void add_episode(CLI::App* cmd, sim::EpisodeConfig& ec) {
  cmd->add_option("--control-interval", ec.control_interval,
                  "control period seconds (paper: 0.5)")->capture_default_str();
  cmd->add_option("--physics-substep", ec.physics_substep, "integration substep (decided)")
      ->capture_default_str();
  cmd->add_option("--max-control-steps", ec.max_control_steps, "episode step cap (decided)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--arrival-distance", ec.arrival_distance, "goal radius meters (decided)")
      ->capture_default_str();
  cmd->add_option("--robot-radius", ec.robot_radius, "robot disc radius meters (decided)")
      ->capture_default_str();
  cmd->add_option("--v-max", ec.v_max, "max linear speed m/s (decided)")->capture_default_str();
  cmd->add_option("--omega-max", ec.omega_max, "max turn rate rad/s (decided)")
      ->capture_default_str();
  cmd->add_option("--lidar-noise-sigma", ec.lidar_noise_sigma,
                  "Gaussian range noise sigma, 0 disables (decided)")->capture_default_str();
  cmd->add_option("--sample-clearance", ec.sample_clearance,
                  "clearance for sampled start/goal (decided)")->capture_default_str();
  cmd->add_option("--min-goal-separation", ec.min_goal_separation,
                  "minimum start-goal distance (decided)")->capture_default_str();
}

inline void add_expert(CLI::App* cmd, expert::ExpertConfig& xc) {
  cmd->add_option("--dwa-v-samples", xc.dwa.v_samples, "velocity samples (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-w-samples", xc.dwa.w_samples, "turn-rate samples (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-horizon", xc.dwa.horizon, "rollout horizon seconds (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-weight-heading", xc.dwa.weight_heading, "heading weight (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-weight-clearance", xc.dwa.weight_clearance, "clearance weight (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-weight-velocity", xc.dwa.weight_velocity, "velocity weight (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-accel-v", xc.dwa.accel_v, "linear acceleration limit (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-accel-w", xc.dwa.accel_w, "angular acceleration limit (decided)")
      ->capture_default_str();
  cmd->add_option("--dwa-lookahead", xc.dwa.lookahead, "path target lookahead meters (decided)")
      ->capture_default_str();
  cmd->add_option("--replan-every", xc.replan_every, "A* replan cadence in steps (decided)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--inflate-margin", xc.inflate_margin,
                  "planning inflation beyond robot radius (decided)")->capture_default_str();
  cmd->add_option("--goal-clearance", xc.goal_clearance, "sampled goal clearance (decided)")
      ->capture_default_str();
}

}  // namespace detail

/// Flat `key = value` lines, `#` comments; later lines win on repeats.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file not found: " + path);
  std::map<std::string, size_t> seen;
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string v) {
      size_t a = v.find_first_not_of(" \t\r");
      size_t b = v.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    auto it = seen.find(key);
    if (it != seen.end()) {
      out[it->second].second = value;
    } else {
      seen[key] = out.size();
      out.emplace_back(key, value);
    }
  }
  return out;
}

// Config-file values become synthetic arguments injected after the subcommand
// name, skipping keys already present as flags: defaults < file < flags.
// Unknown keys are rejected against the subcommand's option set.
inline std::vector<std::string> expand_config_args(const CLI::App& app,
                                                   std::vector<std::string> args) {
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  size_t sub_pos = std::string::npos;
  const CLI::App* sub = nullptr;
  for (size_t i = 0; i < args.size(); ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      sub = app.get_subcommand_no_throw(args[i]);
      sub_pos = i;
      break;
    }
  }
  if (!sub) return args;  // let the parser report the bad subcommand

  auto given = [&](const std::string& key) {
    std::string flag = "--" + key;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };

  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(config_path)) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("config: unknown key '" + key + "' for " + sub->get_name());
    if (given(key)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes" || value == "on")
        injected.push_back("--" + key);
      else if (value != "false" && value != "0" && value != "no" && value != "off")
        throw UsageError("config: flag '" + key + "' wants a boolean, got '" + value + "'");
    } else {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  args.insert(args.begin() + sub_pos + 1, injected.begin(), injected.end());
  return args;
}

/// Resolved key=value view of a subcommand's options, sorted by key.
inline std::map<std::string, std::string> resolved_options(const CLI::App* cmd) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : cmd->get_options()) {
    auto lnames = opt->get_lnames();
    if (lnames.empty()) continue;
    std::string name = lnames.front();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->get_expected_min() == 0) {
      out[name] = opt->count() > 0 ? "true" : "false";  // flags
    } else if (opt->count() > 0) {
      out[name] = opt->results().back();
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const std::map<std::string, std::string>& kv) {
  std::string all;
  for (const auto& [k, v] : kv) all += k + "=" + v + "\n";
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(all)));
  return buf;
}

// Every artifact-producing run writes its resolved configuration next to its
// outputs; re-running with `--config <sidecar>` reproduces the run.
inline void write_config_sidecar(const CLI::App* cmd, const std::string& out_path) {
  if (out_path.empty()) return;
  auto kv = resolved_options(cmd);
  std::ofstream f(out_path + ".config", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write config sidecar for " + out_path);
  f << "# resolved navseed configuration (" << cmd->get_name() << ")\n";
  f << "# config_hash " << config_hash(kv) << "\n";
  for (const auto& [k, v] : kv)
    if (!v.empty()) f << k << " = " << v << "\n";
}

}  // namespace navseed::cli

#endif  // NAVSEED_CONFIG_HPP
