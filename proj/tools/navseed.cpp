// navseed: 2D lidar avoidance navigation with offline-pretrained actor-critic
// agents. Subcommands cover the pipeline end to end: expert dataset
// generation, offline pre-training, online adaptation, evaluation, regime
// comparisons, and the reproduction suite.

#include <CLI11.hpp>

#include "navseed/config.hpp"
#include "navseed/repro.hpp"

using namespace navseed;

namespace {

int cmd_gen_data(const cli::RunConfig& cfg, const CLI::App* cmd) {
  sim::WorldMap map = cli::resolve_map(cfg.map);
  expert::ExpertConfig xc = cfg.expert;
  xc.include_failures = cfg.include_failures;
  expert::ExpertDataset ds = expert::build_dataset_to_file(
      map, cfg.episodes, cfg.episode, cfg.reward, xc, cfg.seed, cfg.out_path, cfg.workers);
  cli::write_config_sidecar(cmd, cfg.out_path);
  std::printf("episodes %d success %d collision %d timeout %d records %zu mean_reward %s\n",
              ds.stats.episodes, ds.stats.success_episodes, ds.stats.collision_episodes,
              ds.stats.timeout_episodes, ds.records.size(),
              format_number(ds.stats.mean_episode_reward).c_str());
  if (ds.stats.low_success_warning)
    std::printf("warning: expert success rate below 0.5\n");
  return 0;
}

int cmd_pretrain(const cli::RunConfig& cfg, const CLI::App* cmd) {
  expert::ExpertDataset ds = expert::read_dataset(cfg.data_path);
  auto [model, log] =
      drl::pretrain(ds, nn::algo_from_name(cfg.algo), cfg.hyper, cfg.steps, cfg.seed);
  nn::save_model(model, cfg.out_path);
  cli::write_config_sidecar(cmd, cfg.out_path);
  if (!cfg.log_path.empty()) eval::emit_csv(log, cfg.log_path);
  std::printf("pretrained %s for %lld steps: first1k critic %s last1k critic %s\n",
              cfg.algo.c_str(), static_cast<long long>(cfg.steps),
              format_number(eval::mean_head_loss(log, 1000)).c_str(),
              format_number(eval::mean_tail_loss(log, 1000)).c_str());
  return 0;
}

int cmd_train(const cli::RunConfig& cfg, const CLI::App* cmd) {
  sim::WorldMap map = cli::resolve_map(cfg.map);
  drl::TrainMode mode = drl::mode_from_name(cfg.mode);
  nn::Algo algo = nn::algo_from_name(cfg.algo);

  std::optional<nn::ModelParams> init;
  if (!cfg.init_path.empty()) init = nn::load_model(cfg.init_path, algo);
  std::unique_ptr<drl::ExpertBuffer> ebuf;
  expert::ExpertDataset ds;
  if (mode != drl::TrainMode::Scratch) {
    if (cfg.data_path.empty())
      throw std::runtime_error("train: --expert-data is required for mode " + cfg.mode);
    ds = expert::read_dataset(cfg.data_path);
    ebuf = std::make_unique<drl::ExpertBuffer>(ds.records, cfg.hyper.per_alpha);
  }

  sim::Environment env(map, cfg.episode, cfg.reward, cfg.seed);
  drl::OnlineConfig ocfg{mode, algo, cfg.env_steps, cfg.seed};
  auto [model, log] = drl::online_train(env, std::move(init), ebuf.get(), ocfg, cfg.hyper);
  nn::save_model(model, cfg.out_path);
  cli::write_config_sidecar(cmd, cfg.out_path);
  if (!cfg.log_path.empty()) eval::emit_csv(log, cfg.log_path);

  eval::RunReport r = eval::summarize_online_run(cfg.mode, cfg.mode, algo, cfg.seed, log,
                                                 cfg.env_steps, 0.0);
  std::printf("trained %s/%s for %lld env steps: episodes %d final5_reward %s last20_success %s\n",
              cfg.mode.c_str(), cfg.algo.c_str(), static_cast<long long>(cfg.env_steps),
              r.episodes, format_number(r.final5_reward).c_str(),
              format_number(r.last20_success).c_str());
  return 0;
}

int cmd_eval(const cli::RunConfig& cfg, const CLI::App* cmd) {
  sim::WorldMap map = cli::resolve_map(cfg.map);
  nn::ModelParams model = nn::load_model(cfg.init_path);
  eval::EvalMetrics m = eval::run_policy(map, cfg.episode, cfg.reward, model, cfg.episodes,
                                         cfg.seed, cfg.workers);
  if (!cfg.out_path.empty()) {
    eval::emit_csv(m, cfg.out_path);
    cli::write_config_sidecar(cmd, cfg.out_path);
  }
  std::printf("episodes %d success %s collision %s timeout %s mean_reward %s mean_steps %s\n",
              m.episodes, format_number(m.success_rate).c_str(),
              format_number(m.collision_rate).c_str(), format_number(m.timeout_rate).c_str(),
              format_number(m.mean_episode_reward).c_str(),
              format_number(m.mean_steps_to_goal).c_str());
  return 0;
}

std::vector<uint64_t> seed_list(uint64_t base, int n) {
  std::vector<uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(base + static_cast<uint64_t>(i));
  return out;
}

std::string svg_sibling(const std::string& out_path) {
  auto dot = out_path.find_last_of('.');
  std::string stem = dot == std::string::npos ? out_path : out_path.substr(0, dot);
  auto slash = stem.find_last_of('/');
  std::string dir = slash == std::string::npos ? "" : stem.substr(0, slash + 1);
  return dir + "curves.svg";
}

int cmd_compare_offline(const cli::RunConfig& cfg, const CLI::App* cmd, int n_seeds) {
  expert::ExpertDataset ds = expert::read_dataset(cfg.data_path);
  eval::ComparisonReport rep =
      eval::compare_offline(ds, cfg.hyper, cfg.steps, seed_list(cfg.seed, n_seeds), cfg.workers);
  std::string hash = cli::config_hash(cli::resolved_options(cmd));
  for (auto& r : rep.runs) r.config_hash = hash;
  eval::emit_csv(rep, cfg.out_path);
  eval::emit_timing(rep, cfg.out_path + ".timing.txt");
  cli::write_config_sidecar(cmd, cfg.out_path);
  eval::emit_svg_curves(rep, "critic_loss",
                        cfg.log_path.empty() ? svg_sibling(cfg.out_path) : cfg.log_path);
  for (const auto& r : rep.runs)
    std::printf("%s: min %s max %s end %s conv %s\n", r.label.c_str(),
                format_number(r.min_loss).c_str(), format_number(r.max_loss).c_str(),
                format_number(r.end_loss).c_str(),
                r.steps_to_convergence ? std::to_string(*r.steps_to_convergence).c_str() : "none");
  return 0;
}

int cmd_compare_online(const cli::RunConfig& cfg, const CLI::App* cmd, int n_seeds) {
  sim::WorldMap map = cli::resolve_map(cfg.map);
  expert::ExpertDataset ds = expert::read_dataset(cfg.data_path);
  nn::ModelParams init = nn::load_model(cfg.init_path, nn::algo_from_name(cfg.algo));
  eval::OnlineComparisonSpec spec;
  spec.map = &map;
  spec.dataset = &ds;
  spec.init_model = &init;
  spec.episode = cfg.episode;
  spec.reward = cfg.reward;
  spec.env_step_budget = cfg.env_steps;
  spec.seeds = seed_list(cfg.seed, n_seeds);
  spec.algo = nn::algo_from_name(cfg.algo);
  eval::ComparisonReport rep = eval::compare_online(spec, cfg.hyper, cfg.workers);
  std::string hash = cli::config_hash(cli::resolved_options(cmd));
  for (auto& r : rep.runs) r.config_hash = hash;
  eval::emit_csv(rep, cfg.out_path);
  eval::emit_timing(rep, cfg.out_path + ".timing.txt");
  cli::write_config_sidecar(cmd, cfg.out_path);
  eval::emit_svg_curves(rep, "episode_reward",
                        cfg.log_path.empty() ? svg_sibling(cfg.out_path) : cfg.log_path);
  for (const auto& r : rep.runs)
    std::printf("%s: final5 %s last20_success %s steps_to_0.6 %s expert_rows %lld\n",
                r.label.c_str(), format_number(r.final5_reward).c_str(),
                format_number(r.last20_success).c_str(),
                r.steps_to_success06 ? std::to_string(*r.steps_to_success06).c_str() : "none",
                static_cast<long long>(r.expert_rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D lidar avoidance navigation: expert data, offline pre-training, online "
               "adaptation, evaluation"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  int n_seeds = 3;
  std::string repro_scale = "smoke";
  std::string repro_out = "repro_out";

  CLI::App* gen = app.add_subcommand("gen-data", "generate an expert dataset with A* + DWA");
  gen->add_option("--map", cfg.map, "embedded map name or navmap file (decided)")
      ->capture_default_str();
  gen->add_option("--episodes", cfg.episodes, "episodes to attempt")
      ->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--out", cfg.out_path, "output dataset file")->required();
  gen->add_flag("--include-failures", cfg.include_failures,
                "keep collision/timeout episodes in the dataset (decided: excluded)");
  cli::detail::add_common(gen, cfg);
  cli::detail::add_reward(gen, cfg.reward);
  cli::detail::add_episode(gen, cfg.episode);
  cli::detail::add_expert(gen, cfg.expert);

  CLI::App* pre = app.add_subcommand("pretrain", "offline pre-training on an expert dataset");
  pre->add_option("--algo", cfg.algo, "ddpg | sac | td3")
      ->check(CLI::IsMember({"ddpg", "sac", "td3"}))->capture_default_str();
  pre->add_option("--data", cfg.data_path, "expert dataset file")->required();
  pre->add_option("--steps", cfg.steps, "gradient updates")->check(CLI::PositiveNumber)
      ->capture_default_str();
  pre->add_option("--out", cfg.out_path, "output model file")->required();
  pre->add_option("--log", cfg.log_path, "training log CSV");
  cli::detail::add_common(pre, cfg);
  cli::detail::add_hyper(pre, cfg.hyper);

  CLI::App* train = app.add_subcommand("train", "online adaptation in the simulator");
  train->add_option("--mode", cfg.mode, "scratch | per | pretrain_per")
      ->check(CLI::IsMember({"scratch", "per", "pretrain_per"}))->capture_default_str();
  train->add_option("--algo", cfg.algo, "ddpg | sac | td3")
      ->check(CLI::IsMember({"ddpg", "sac", "td3"}))->capture_default_str();
  train->add_option("--map", cfg.map, "embedded map name or navmap file")->capture_default_str();
  train->add_option("--init", cfg.init_path, "initial model (required for pretrain_per)");
  train->add_option("--expert-data", cfg.data_path, "expert dataset for the PER buffer");
  train->add_option("--env-steps", cfg.env_steps, "environment step budget")
      ->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--out", cfg.out_path, "output model file")->required();
  train->add_option("--log", cfg.log_path, "training log CSV");
  cli::detail::add_common(train, cfg);
  cli::detail::add_hyper(train, cfg.hyper);
  cli::detail::add_reward(train, cfg.reward);
  cli::detail::add_episode(train, cfg.episode);

  CLI::App* ev = app.add_subcommand("eval", "greedy policy evaluation");
  ev->add_option("--model", cfg.init_path, "model file")->required();
  ev->add_option("--map", cfg.map, "embedded map name or navmap file")->capture_default_str();
  ev->add_option("--episodes", cfg.episodes, "evaluation episodes")
      ->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--out", cfg.out_path, "per-episode CSV");
  cli::detail::add_common(ev, cfg);
  cli::detail::add_reward(ev, cfg.reward);
  cli::detail::add_episode(ev, cfg.episode);

  CLI::App* coff = app.add_subcommand("compare-offline",
                                      "pre-train ddpg/sac/td3 on shared data and seeds");
  coff->add_option("--data", cfg.data_path, "expert dataset file")->required();
  coff->add_option("--steps", cfg.steps, "gradient updates per run")
      ->check(CLI::PositiveNumber)->capture_default_str();
  coff->add_option("--seeds", n_seeds, "number of seeds (base = --seed)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  coff->add_option("--out", cfg.out_path, "report CSV")->required();
  coff->add_option("--curves", cfg.log_path, "loss curves SVG");
  cli::detail::add_common(coff, cfg);
  cli::detail::add_hyper(coff, cfg.hyper);

  CLI::App* con = app.add_subcommand("compare-online",
                                     "scratch vs per vs pretrain_per under one budget");
  con->add_option("--map", cfg.map, "embedded map name or navmap file")->capture_default_str();
  con->add_option("--data", cfg.data_path, "expert dataset file")->required();
  con->add_option("--init", cfg.init_path, "pretrained model for pretrain_per")->required();
  con->add_option("--algo", cfg.algo, "ddpg | sac | td3")
      ->check(CLI::IsMember({"ddpg", "sac", "td3"}))->capture_default_str();
  con->add_option("--env-steps", cfg.env_steps, "env step budget per run")
      ->check(CLI::PositiveNumber)->capture_default_str();
  con->add_option("--seeds", n_seeds, "number of seeds (base = --seed)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  con->add_option("--out", cfg.out_path, "report CSV")->required();
  con->add_option("--curves", cfg.log_path, "reward curves SVG");
  cli::detail::add_common(con, cfg);
  cli::detail::add_hyper(con, cfg.hyper);
  cli::detail::add_reward(con, cfg.reward);
  cli::detail::add_episode(con, cfg.episode);

  CLI::App* rep = app.add_subcommand("repro", "end-to-end reproduction suite");
  rep->add_option("--out-dir", repro_out, "output directory")->capture_default_str();
  rep->add_option("--scale", repro_scale, "smoke | desk")
      ->check(CLI::IsMember({"smoke", "desk"}))->capture_default_str();
  cli::detail::add_common(rep, cfg);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = cli::expand_config_args(app, std::move(args));
  } catch (const cli::UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(cfg, gen);
    if (pre->parsed()) return cmd_pretrain(cfg, pre);
    if (train->parsed()) return cmd_train(cfg, train);
    if (ev->parsed()) return cmd_eval(cfg, ev);
    if (coff->parsed()) return cmd_compare_offline(cfg, coff, n_seeds);
    if (con->parsed()) return cmd_compare_online(cfg, con, n_seeds);
    if (rep->parsed()) {
      cli::ReproOptions opt;
      opt.out_dir = repro_out;
      opt.scale = repro_scale;
      if (rep->count("--seed") > 0) opt.seed = cfg.seed;
      opt.workers = cfg.workers;
      cli::run_reproduction_suite(opt);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
