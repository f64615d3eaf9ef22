#ifndef NAVSEED_EXPERT_HPP
#define NAVSEED_EXPERT_HPP

#include <optional>
#include <thread>
#include <vector>

#include "navseed/astar.hpp"
#include "navseed/dataset.hpp"
#include "navseed/dwa.hpp"
#include "navseed/sim.hpp"

namespace navseed::expert {

using sim::Environment;
using sim::EpisodeConfig;
using sim::Pose;
using sim::RewardParams;
using sim::WorldMap;

struct ExpertConfig {
  DWAConfig dwa;
  int replan_every = 10;            // control steps between A* replans
  double inflate_margin = 0.05;     // added to robot radius for planning
  double goal_clearance = 0.3;
  bool include_failures = false;
};

namespace detail {

inline std::vector<size_t> eligible_cells(const WorldMap& map, double min_clearance) {
  std::vector<size_t> out;
  for (int cy = 0; cy < map.height_cells; ++cy)
    for (int cx = 0; cx < map.width_cells; ++cx) {
      if (map.occupied(cx, cy)) continue;
      Vec2 c = map.cell_center(cx, cy);
      if (!sim::check_collision(map, Pose{c.x, c.y, 0.0}, min_clearance))
        out.push_back(static_cast<size_t>(cy) * map.width_cells + cx);
    }
  return out;
}

inline Vec2 cell_point(const WorldMap& map, size_t idx) {
  return map.cell_center(static_cast<int>(idx) % map.width_cells,
                         static_cast<int>(idx) / map.width_cells);
}

}  // namespace detail

/// Uniform draw among free cells with at least `min_clearance` of clearance.
inline Vec2 sample_goal(const WorldMap& map, Rng& rng, double min_clearance) {
  std::vector<size_t> cells = detail::eligible_cells(map, min_clearance);
  if (cells.empty()) throw std::runtime_error("sample_goal: no free cell with requested clearance");
  return detail::cell_point(map, cells[rng.uniform_index(cells.size())]);
}

// Expert rollout: A* global plan tracked by the dynamic-window controller,
// recording transitions through the same environment step the DRL agent uses.
// The environment must already be reset with a feasible start/goal.
inline std::vector<TransitionRecord> generate_episode(Environment& env, Rng& rng,
                                                      const ExpertConfig& cfg,
                                                      sim::Observation initial_obs) {
  (void)rng;  // the expert itself is deterministic; rng reserved for noise variants
  std::vector<TransitionRecord> records;
  double inflate = env.config().robot_radius + cfg.inflate_margin;

  // steer at the exact goal point, not the goal cell center, so the tracker
  // can close the last few centimeters inside the arrival radius
  auto plan = [&]() {
    PlannedPath p =
        astar_plan_from_nearest_free(env.map(), {env.pose().x, env.pose().y}, env.goal(), inflate);
    if (!p.waypoints.empty()) p.waypoints.back() = env.goal();
    return p;
  };

  PlannedPath path = plan();
  VelocityState vel;
  sim::Observation obs = initial_obs;

  while (env.active()) {
    if (env.step_count() > 0 && env.step_count() % cfg.replan_every == 0) path = plan();
    sim::ActionCommand cmd =
        dwa_control(env.pose(), vel, path, env.current_scan(), cfg.dwa, env.config());
    sim::StepOutcome out =
        env.step({static_cast<float>(cmd.a_v), static_cast<float>(cmd.a_w)});
    TransitionRecord rec;
    rec.state = obs;
    rec.action = {static_cast<float>(cmd.a_v), static_cast<float>(cmd.a_w)};
    rec.reward = static_cast<float>(out.reward.total);
    rec.next_state = out.observation;
    rec.done_kind = out.terminal_kind;
    records.push_back(rec);
    obs = out.observation;
    vel = {cmd.v, cmd.omega};
  }
  return records;
}

struct EpisodeResult {
  std::vector<TransitionRecord> records;
  sim::TerminalKind outcome = sim::TerminalKind::None;
  double total_reward = 0.0;
};

/// One seeded episode: sampled start/goal (A*-reachable), expert rollout.
inline EpisodeResult run_expert_episode(const WorldMap& map, const EpisodeConfig& env_cfg,
                                        const RewardParams& rew, const ExpertConfig& cfg,
                                        uint64_t seed, uint64_t episode_index) {
  Environment env(map, env_cfg, rew, seed + episode_index);
  Rng rng(seed, 0xE0000000ull + episode_index);
  double inflate = env_cfg.robot_radius + cfg.inflate_margin;

  EpisodeResult result;
  for (int attempt = 0; attempt < 32; ++attempt) {
    Vec2 goal = sample_goal(map, rng, std::max(cfg.goal_clearance, env_cfg.robot_radius));
    sim::Observation obs = env.reset(std::nullopt, goal);
    try {
      astar_plan(map, {env.pose().x, env.pose().y}, env.goal(), inflate);
    } catch (const NoPathError&) {
      continue;  // resample start/goal
    }
    result.records = generate_episode(env, rng, cfg, obs);
    result.outcome = result.records.back().done_kind;
    for (const auto& r : result.records) result.total_reward += r.reward;
    return result;
  }
  throw NoPathError("expert episode: no feasible start/goal pair found");
}

// The dataset build: n seeded episodes with fresh sampled goals, failures
// excluded unless configured otherwise. Worker fan-out partitions episode
// indices; per-episode seeds make the result identical to a serial run.
inline ExpertDataset build_dataset(const WorldMap& map, int n_episodes,
                                   const EpisodeConfig& env_cfg, const RewardParams& rew,
                                   const ExpertConfig& cfg, uint64_t seed, int workers = 1) {
  if (n_episodes < 1) throw std::invalid_argument("build_dataset: n_episodes must be >= 1");

  std::vector<EpisodeResult> episodes(n_episodes);
  workers = std::max(1, std::min(workers, n_episodes));
  if (workers == 1) {
    for (int i = 0; i < n_episodes; ++i)
      episodes[i] = run_expert_episode(map, env_cfg, rew, cfg, seed, i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n_episodes; i += workers)
          episodes[i] = run_expert_episode(map, env_cfg, rew, cfg, seed, i);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExpertDataset ds;
  DatasetStats& s = ds.stats;
  double reward_total = 0.0;
  for (const auto& ep : episodes) {
    ++s.episodes;
    reward_total += ep.total_reward;
    if (ep.outcome == sim::TerminalKind::Arrived) ++s.success_episodes;
    if (ep.outcome == sim::TerminalKind::Collided) ++s.collision_episodes;
    if (ep.outcome == sim::TerminalKind::Timeout) ++s.timeout_episodes;
    bool keep = cfg.include_failures || ep.outcome == sim::TerminalKind::Arrived;
    if (keep) ds.records.insert(ds.records.end(), ep.records.begin(), ep.records.end());
  }
  s.mean_episode_reward = reward_total / s.episodes;
  s.low_success_warning = s.success_episodes * 2 < s.episodes;
  if (s.low_success_warning)
    NAVSEED_LOG_INFO("expert success rate %.2f below 0.5 over %d episodes",
                     static_cast<double>(s.success_episodes) / s.episodes, s.episodes);
  return ds;
}

inline ExpertDataset build_dataset_to_file(const WorldMap& map, int n_episodes,
                                           const EpisodeConfig& env_cfg, const RewardParams& rew,
                                           const ExpertConfig& cfg, uint64_t seed,
                                           const std::string& out_path, int workers = 1) {
  ExpertDataset ds = build_dataset(map, n_episodes, env_cfg, rew, cfg, seed, workers);
  write_dataset(ds, out_path);
  return ds;
}

}  // namespace navseed::expert

#endif  // NAVSEED_EXPERT_HPP
