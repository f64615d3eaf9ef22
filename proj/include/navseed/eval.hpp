#ifndef NAVSEED_EVAL_HPP
#define NAVSEED_EVAL_HPP

#include <chrono>
#include <functional>
#include <optional>
#include <thread>

#include "navseed/model_io.hpp"
#include "navseed/train.hpp"

namespace navseed::eval {

using drl::HyperParams;
using drl::TrainLog;
using sim::EpisodeConfig;
using sim::RewardParams;
using sim::TerminalKind;
using sim::WorldMap;

struct EvalEpisode {
  int episode = 0;
  TerminalKind outcome = TerminalKind::None;
  float total_reward = 0.0f;
  int steps = 0;
};

struct EvalMetrics {
  int episodes = 0;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double timeout_rate = 0.0;
  double mean_episode_reward = 0.0;
  double mean_steps_to_goal = 0.0;  // successes only
  std::vector<EvalEpisode> rows;
};

/// Rates and means are pure functions of the per-episode rows.
inline EvalMetrics metrics_from_rows(std::vector<EvalEpisode> rows) {
  EvalMetrics m;
  m.rows = std::move(rows);
  m.episodes = static_cast<int>(m.rows.size());
  if (m.episodes == 0) return m;
  int succ = 0, coll = 0, tout = 0;
  double reward = 0.0, steps_succ = 0.0;
  for (const auto& r : m.rows) {
    succ += r.outcome == TerminalKind::Arrived;
    coll += r.outcome == TerminalKind::Collided;
    tout += r.outcome == TerminalKind::Timeout;
    reward += r.total_reward;
    if (r.outcome == TerminalKind::Arrived) steps_succ += r.steps;
  }
  m.success_rate = static_cast<double>(succ) / m.episodes;
  m.collision_rate = static_cast<double>(coll) / m.episodes;
  m.timeout_rate = static_cast<double>(tout) / m.episodes;
  m.mean_episode_reward = reward / m.episodes;
  m.mean_steps_to_goal = succ > 0 ? steps_succ / succ : 0.0;
  return m;
}

// A policy is anything mapping (env, observation) -> normalized action; the
// env reference gives scripted policies access to pose/scan/goal.
using PolicyFn = std::function<std::array<float, 2>(sim::Environment&, const sim::Observation&)>;

// Rolls seeded episodes (env seed = base + episode index) so results do not
// depend on the worker count. The factory builds one policy per worker.
template <typename PolicyFactory>
EvalMetrics run_policy_with(const WorldMap& map, const EpisodeConfig& ec, const RewardParams& rp,
                            PolicyFactory make_policy, int episodes, uint64_t seed,
                            int workers = 1) {
  if (episodes < 1) throw std::invalid_argument("run_policy: episodes must be >= 1");
  std::vector<EvalEpisode> rows(episodes);
  workers = std::max(1, std::min(workers, episodes));

  auto run_range = [&](int worker) {
    PolicyFn policy = make_policy(worker);
    for (int e = worker; e < episodes; e += workers) {
      sim::Environment env(map, ec, rp, seed + static_cast<uint64_t>(e));
      sim::Observation obs = env.reset();
      EvalEpisode row;
      row.episode = e;
      for (;;) {
        auto action = policy(env, obs);
        sim::StepOutcome out = env.step(action);
        row.total_reward += static_cast<float>(out.reward.total);
        ++row.steps;
        if (out.done) {
          row.outcome = out.terminal_kind;
          break;
        }
        obs = out.observation;
      }
      rows[e] = row;
    }
  };

  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
    for (auto& t : pool) t.join();
  }
  return metrics_from_rows(std::move(rows));
}

/// Greedy rollout of a trained model (no exploration noise; SAC uses tanh(mu)).
inline EvalMetrics run_policy(const WorldMap& map, const EpisodeConfig& ec,
                              const RewardParams& rp, const nn::ModelParams& params,
                              int episodes, uint64_t seed, int workers = 1) {
  if (params.dims.obs != sim::kObservationDim)
    throw std::invalid_argument("run_policy: model observation width mismatch");
  auto factory = [&params](int) -> PolicyFn {
    auto ws = std::make_shared<nn::Workspace>();
    return [&params, ws](sim::Environment&, const sim::Observation& obs) {
      ws->reset();
      nn::Tensor& o = ws->next(1, sim::kObservationDim);
      for (int j = 0; j < sim::kObservationDim; ++j) o.at(0, j) = obs[j];
      if (params.algo == nn::Algo::SAC) {
        nn::Tensor act, logp;
        nn::sac_sample(params.actor, o, nullptr, *ws, act, logp, /*deterministic=*/true);
        return std::array<float, 2>{act.at(0, 0), act.at(0, 1)};
      }
      const nn::Tensor& act = params.actor.forward(o, *ws);
      return std::array<float, 2>{act.at(0, 0), act.at(0, 1)};
    };
  };
  return run_policy_with(map, ec, rp, factory, episodes, seed, workers);
}

// ---------------------------------------------------------------------------
// Threshold crossings over logged series

struct SeriesPoint {
  int64_t step = 0;
  double value = 0.0;
};

inline std::vector<SeriesPoint> extract_series(const TrainLog& log, const std::string& metric) {
  std::vector<SeriesPoint> out;
  if (metric == "critic_loss" || metric == "actor_loss") {
    for (const auto& u : log.updates) {
      if (metric == "actor_loss") {
        if (u.actor_loss) out.push_back({u.step, static_cast<double>(*u.actor_loss)});
      } else {
        out.push_back({u.step, static_cast<double>(u.critic_loss)});
      }
    }
    return out;
  }
  if (metric == "episode_reward" || metric == "success" || metric == "arrive_reward" ||
      metric == "distance_reward") {
    for (const auto& e : log.episodes) {
      double v = 0.0;
      if (metric == "episode_reward") v = e.total_reward;
      if (metric == "success") v = e.outcome == TerminalKind::Arrived ? 1.0 : 0.0;
      if (metric == "arrive_reward") v = e.arrive_reward;
      if (metric == "distance_reward") v = e.distance_reward;
      out.push_back({e.env_steps, v});
    }
    return out;
  }
  throw std::invalid_argument("unknown metric: " + metric);
}

/// First step at which the trailing `window`-point moving average crosses the
/// threshold (>= when direction is up, <= when down). none if never.
inline std::optional<int64_t> steps_to_threshold(const std::vector<SeriesPoint>& series,
                                                 double threshold, int window, bool up = true) {
  if (window < 1) throw std::invalid_argument("steps_to_threshold: window must be >= 1");
  double acc = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    acc += series[i].value;
    if (i >= static_cast<size_t>(window)) acc -= series[i - window].value;
    if (i + 1 >= static_cast<size_t>(window)) {
      double avg = acc / window;
      if ((up && avg >= threshold) || (!up && avg <= threshold)) return series[i].step;
    }
  }
  return std::nullopt;
}

inline std::optional<int64_t> steps_to_threshold(const TrainLog& log, const std::string& metric,
                                                 double threshold, int window, bool up = true) {
  return steps_to_threshold(extract_series(log, metric), threshold, window, up);
}

// ---------------------------------------------------------------------------
// Regime comparisons

struct RunReport {
  std::string label;
  std::string kind;  // "offline" or "online"
  std::string algo;
  std::string mode;
  uint64_t seed = 0;
  double min_loss = 0.0;
  double max_loss = 0.0;
  double end_loss = 0.0;
  std::optional<int64_t> steps_to_convergence;  // offline: loss within 110% of end
  double final5_reward = 0.0;                   // online regimes
  double last20_success = 0.0;
  std::optional<int64_t> steps_to_success06;
  int episodes = 0;
  int64_t env_steps = 0;
  int64_t expert_rows = 0;
  double wall_time_sec = 0.0;  // reported out of band, never in CSV
  std::string config_hash;
};

struct ComparisonReport {
  std::vector<RunReport> runs;
  std::vector<TrainLog> logs;             // parallel to runs, for curve emission
  std::vector<nn::ModelParams> models;    // final parameters per run
};

inline double mean_tail_loss(const TrainLog& log, int64_t count) {
  int64_t n = static_cast<int64_t>(log.updates.size());
  int64_t k = std::min(count, n);
  double acc = 0.0;
  for (int64_t i = n - k; i < n; ++i) acc += log.updates[i].critic_loss;
  return k > 0 ? acc / k : 0.0;
}

inline double mean_head_loss(const TrainLog& log, int64_t count) {
  int64_t k = std::min<int64_t>(count, log.updates.size());
  double acc = 0.0;
  for (int64_t i = 0; i < k; ++i) acc += log.updates[i].critic_loss;
  return k > 0 ? acc / k : 0.0;
}

// Convergence step in the sense of the comparison table: first step at which
// the windowed critic loss stays within 110% of the final value (final-1k
// mean). Window 500 smooths batch noise.
inline std::optional<int64_t> offline_convergence_step(const TrainLog& log) {
  double end = mean_tail_loss(log, 1000);  // squared-error losses are nonnegative
  return steps_to_threshold(log, "critic_loss", 1.1 * end, 500, /*up=*/false);
}

inline RunReport summarize_offline_run(const std::string& label, nn::Algo algo, uint64_t seed,
                                       const TrainLog& log, double wall_sec) {
  RunReport r;
  r.label = label;
  r.kind = "offline";
  r.algo = nn::algo_name(algo);
  r.seed = seed;
  r.min_loss = 1e300;
  r.max_loss = -1e300;
  for (const auto& u : log.updates) {
    r.min_loss = std::min(r.min_loss, static_cast<double>(u.critic_loss));
    r.max_loss = std::max(r.max_loss, static_cast<double>(u.critic_loss));
  }
  r.end_loss = mean_tail_loss(log, 1000);
  r.steps_to_convergence = offline_convergence_step(log);
  r.env_steps = 0;
  r.wall_time_sec = wall_sec;
  return r;
}

// Offline comparison: identical data and seeds across the three algorithms.
inline ComparisonReport compare_offline(const expert::ExpertDataset& dataset,
                                        const HyperParams& hp, int64_t steps,
                                        const std::vector<uint64_t>& seeds, int workers = 1) {
  if (seeds.empty()) throw std::invalid_argument("compare_offline: need at least one seed");
  struct Job {
    nn::Algo algo;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto algo : {nn::Algo::DDPG, nn::Algo::SAC, nn::Algo::TD3})
    for (uint64_t s : seeds) jobs.push_back({algo, s});

  ComparisonReport report;
  report.runs.resize(jobs.size());
  report.logs.resize(jobs.size());
  report.models.resize(jobs.size());

  auto run_job = [&](size_t j) {
    auto t0 = std::chrono::steady_clock::now();
    auto [model, log] = drl::pretrain(dataset, jobs[j].algo, hp, steps, jobs[j].seed);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string label =
        std::string(nn::algo_name(jobs[j].algo)) + "-seed" + std::to_string(jobs[j].seed);
    report.runs[j] = summarize_offline_run(label, jobs[j].algo, jobs[j].seed, log, wall);
    report.logs[j] = std::move(log);
    report.models[j] = std::move(model);
  };

  if (workers <= 1) {
    for (size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::vector<std::thread> pool;
    int w = std::min<int>(workers, static_cast<int>(jobs.size()));
    for (int t = 0; t < w; ++t)
      pool.emplace_back([&, t] {
        for (size_t j = t; j < jobs.size(); j += w) run_job(j);
      });
    for (auto& th : pool) th.join();
  }
  return report;
}

inline RunReport summarize_online_run(const std::string& label, const std::string& mode,
                                      nn::Algo algo, uint64_t seed, const TrainLog& log,
                                      int64_t env_steps, double wall_sec) {
  RunReport r;
  r.label = label;
  r.kind = "online";
  r.algo = nn::algo_name(algo);
  r.mode = mode;
  r.seed = seed;
  r.min_loss = 1e300;
  r.max_loss = -1e300;
  for (const auto& u : log.updates) {
    r.min_loss = std::min(r.min_loss, static_cast<double>(u.critic_loss));
    r.max_loss = std::max(r.max_loss, static_cast<double>(u.critic_loss));
  }
  if (log.updates.empty()) r.min_loss = r.max_loss = 0.0;
  r.end_loss = mean_tail_loss(log, 1000);
  int n = static_cast<int>(log.episodes.size());
  int take5 = std::min(5, n);
  for (int i = n - take5; i < n; ++i) r.final5_reward += log.episodes[i].total_reward;
  if (take5 > 0) r.final5_reward /= take5;
  int take20 = std::min(20, n);
  int succ = 0;
  for (int i = n - take20; i < n; ++i)
    succ += log.episodes[i].outcome == TerminalKind::Arrived;
  r.last20_success = take20 > 0 ? static_cast<double>(succ) / take20 : 0.0;
  r.steps_to_success06 = steps_to_threshold(log, "success", 0.6, 20, /*up=*/true);
  r.episodes = n;
  r.env_steps = env_steps;
  r.expert_rows = log.expert_rows_sampled;
  r.wall_time_sec = wall_sec;
  return r;
}

struct OnlineComparisonSpec {
  const WorldMap* map = nullptr;
  const expert::ExpertDataset* dataset = nullptr;
  const nn::ModelParams* init_model = nullptr;  // for pretrain_per
  EpisodeConfig episode;
  RewardParams reward;
  int64_t env_step_budget = 0;
  std::vector<uint64_t> seeds;
  std::vector<drl::TrainMode> modes = {drl::TrainMode::Scratch, drl::TrainMode::Per,
                                       drl::TrainMode::PretrainPer};
  nn::Algo algo = nn::Algo::TD3;
};

// Online regimes under a shared budget. Each run owns a fresh environment and
// expert buffer so priority updates never leak across runs.
inline ComparisonReport compare_online(const OnlineComparisonSpec& spec, const HyperParams& hp,
                                       int workers = 1) {
  if (spec.seeds.empty()) throw std::invalid_argument("compare_online: need at least one seed");
  for (auto m : spec.modes)
    if (m == drl::TrainMode::PretrainPer && !spec.init_model)
      throw std::invalid_argument("compare_online: pretrain_per requires an init model");

  struct Job {
    drl::TrainMode mode;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto m : spec.modes)
    for (uint64_t s : spec.seeds) jobs.push_back({m, s});

  ComparisonReport report;
  report.runs.resize(jobs.size());
  report.logs.resize(jobs.size());
  report.models.resize(jobs.size());

  auto run_job = [&](size_t j) {
    auto t0 = std::chrono::steady_clock::now();
    sim::Environment env(*spec.map, spec.episode, spec.reward, jobs[j].seed);
    std::unique_ptr<drl::ExpertBuffer> ebuf;
    if (jobs[j].mode != drl::TrainMode::Scratch)
      ebuf = std::make_unique<drl::ExpertBuffer>(spec.dataset->records, hp.per_alpha);
    std::optional<nn::ModelParams> init;
    if (jobs[j].mode == drl::TrainMode::PretrainPer) init = *spec.init_model;
    drl::OnlineConfig cfg{jobs[j].mode, spec.algo, spec.env_step_budget, jobs[j].seed};
    auto [model, log] = drl::online_train(env, std::move(init), ebuf.get(), cfg, hp);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string label =
        std::string(drl::mode_name(jobs[j].mode)) + "-seed" + std::to_string(jobs[j].seed);
    report.runs[j] = summarize_online_run(label, drl::mode_name(jobs[j].mode), spec.algo,
                                          jobs[j].seed, log, spec.env_step_budget, wall);
    report.logs[j] = std::move(log);
    report.models[j] = std::move(model);
  };

  if (workers <= 1) {
    for (size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::vector<std::thread> pool;
    int w = std::min<int>(workers, static_cast<int>(jobs.size()));
    for (int t = 0; t < w; ++t)
      pool.emplace_back([&, t] {
        for (size_t j = t; j < jobs.size(); j += w) run_job(j);
      });
    for (auto& th : pool) th.join();
  }
  return report;
}

}  // namespace navseed::eval

#endif  // NAVSEED_EVAL_HPP
