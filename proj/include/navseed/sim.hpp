#ifndef NAVSEED_SIM_HPP
#define NAVSEED_SIM_HPP

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "navseed/common.hpp"
#include "navseed/map.hpp"

namespace navseed::sim {

constexpr int kLaserBeams = 36;
constexpr double kLaserMin = 0.1;
constexpr double kLaserMax = 6.5;
constexpr double kGoalDistanceNorm = 10.0;
constexpr int kObservationDim = 40;
constexpr int kActionDim = 2;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]
};

using LidarScan = std::array<double, kLaserBeams>;

inline double min_range(const LidarScan& scan) {
  double m = scan[0];
  for (double r : scan) m = std::min(m, r);
  return m;
}

// 40-value state vector: laser(36) normalized by max range, goal distance
// normalized by 10 m, goal bearing normalized by pi, previous action pair.
using Observation = std::array<float, kObservationDim>;

struct ActionCommand {
  double a_v = 0.0;  // normalized [-1, 1]
  double a_w = 0.0;  // normalized [-1, 1]
  double v = 0.0;    // m/s, [0, v_max]
  double omega = 0.0;  // rad/s, [-omega_max, omega_max]

  static ActionCommand from_normalized(double av, double aw, double v_max, double omega_max) {
    ActionCommand c;
    c.a_v = clamp(av, -1.0, 1.0);
    c.a_w = clamp(aw, -1.0, 1.0);
    c.v = v_max * (c.a_v + 1.0) / 2.0;
    c.omega = omega_max * c.a_w;
    return c;
  }

  static ActionCommand from_physical(double v, double omega, double v_max, double omega_max) {
    ActionCommand c;
    c.v = clamp(v, 0.0, v_max);
    c.omega = clamp(omega, -omega_max, omega_max);
    c.a_v = 2.0 * c.v / v_max - 1.0;
    c.a_w = c.omega / omega_max;
    return c;
  }
};

struct RewardParams {
  double w_distance = 5.0;
  double r_c = -10.0;
  double d_threshold = 0.35;
  double r_success = 100.0;
  double r_fail = -100.0;
  double v_slow = 0.1;
  double omega_limit = 0.5;
  double linear_penalty = -4.0;
  double angular_penalty = -1.0;
};

struct RewardBreakdown {
  double r_distance = 0.0;
  double r_collision = 0.0;
  double r_velocity = 0.0;
  double r_arrive = 0.0;
  double total = 0.0;
};

enum class TerminalKind : int { None = 0, Arrived = 1, Collided = 2, Timeout = 3 };

struct StepOutcome {
  Observation observation{};
  RewardBreakdown reward;
  bool done = false;
  TerminalKind terminal_kind = TerminalKind::None;
};

struct EpisodeConfig {
  double control_interval = 0.5;
  double physics_substep = 0.05;
  int max_control_steps = 200;
  double arrival_distance = 0.3;
  double robot_radius = 0.18;
  double v_max = 0.25;
  double omega_max = 1.0;
  double lidar_noise_sigma = 0.0;
  double sample_clearance = 0.3;      // clearance for sampled start/goal cells
  double min_goal_separation = 1.0;   // sampled goals at least this far from start

  int substeps() const {
    double n = control_interval / physics_substep;
    int ni = static_cast<int>(std::lround(n));
    if (ni < 1 || std::abs(n - ni) > 1e-9)
      throw std::invalid_argument("control_interval must be an integer multiple of physics_substep");
    return ni;
  }
};

// ---------------------------------------------------------------------------
// Lidar

// Grid traversal (Amanatides–Woo). Returns the distance from the pose to the
// boundary of the first occupied cell along the beam, clamped to the sensor
// range. Throws if the pose itself is inside an occupied cell.
inline double raycast_beam(const WorldMap& map, double x, double y, double angle) {
  int cx = map.cell_x(x);
  int cy = map.cell_y(y);
  if (map.occupied(cx, cy)) throw std::invalid_argument("raycast: pose inside occupied cell");

  double dx = std::cos(angle);
  double dy = std::sin(angle);
  int step_x = dx > 0 ? 1 : -1;
  int step_y = dy > 0 ? 1 : -1;

  double inv_dx = std::abs(dx) > 1e-15 ? 1.0 / dx : 0.0;
  double inv_dy = std::abs(dy) > 1e-15 ? 1.0 / dy : 0.0;

  // parametric distance to the next vertical/horizontal cell boundary
  auto boundary = [&](double w, double o, int c, int step) {
    return o + (c + (step > 0 ? 1 : 0)) * map.resolution - w;
  };
  double t_max_x = inv_dx != 0.0 ? boundary(x, map.origin_x, cx, step_x) * inv_dx : 1e30;
  double t_max_y = inv_dy != 0.0 ? boundary(y, map.origin_y, cy, step_y) * inv_dy : 1e30;
  double t_delta_x = inv_dx != 0.0 ? map.resolution * std::abs(inv_dx) : 1e30;
  double t_delta_y = inv_dy != 0.0 ? map.resolution * std::abs(inv_dy) : 1e30;

  double t = 0.0;
  while (t <= kLaserMax) {
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cx += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cy += step_y;
    }
    if (map.occupied(cx, cy)) return clamp(t, kLaserMin, kLaserMax);
  }
  return kLaserMax;
}

/// 36 beams at 10 degree increments, beam 0 along the robot heading, CCW.
inline LidarScan raycast(const WorldMap& map, const Pose& pose) {
  LidarScan scan;
  for (int k = 0; k < kLaserBeams; ++k) {
    double angle = pose.theta + k * (2.0 * kPi / kLaserBeams);
    scan[k] = raycast_beam(map, pose.x, pose.y, angle);
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Kinematics and collision

// One control interval of unicycle motion, integrated with midpoint-heading
// Euler substeps (heading advanced half a substep for the translation), which
// tracks the constant-curvature arc to well under a millimeter at these
// speeds. Collision checking happens per substep in Environment::step.
inline Pose advance_substep(const Pose& p, double v, double omega, double dt) {
  Pose out;
  double mid = p.theta + 0.5 * omega * dt;
  out.x = p.x + v * std::cos(mid) * dt;
  out.y = p.y + v * std::sin(mid) * dt;
  out.theta = wrap_angle(p.theta + omega * dt);
  return out;
}

inline Pose step_dynamics(const Pose& state, const ActionCommand& action, const EpisodeConfig& cfg) {
  Pose p = state;
  int n = cfg.substeps();
  for (int i = 0; i < n; ++i) p = advance_substep(p, action.v, action.omega, cfg.physics_substep);
  return p;
}

/// True iff any occupied cell intersects the open disc of `radius` around the pose.
inline bool check_collision(const WorldMap& map, const Pose& pose, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("check_collision: radius must be > 0");
  int cx0 = map.cell_x(pose.x - radius);
  int cx1 = map.cell_x(pose.x + radius);
  int cy0 = map.cell_y(pose.y - radius);
  int cy1 = map.cell_y(pose.y + radius);
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      if (!map.occupied(cx, cy)) continue;
      if (map.in_bounds(cx, cy)) {
        if (point_cell_distance(map, pose.x, pose.y, cx, cy) < radius) return true;
      } else {
        return true;  // disc pokes outside the grid: closed world
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Reward

inline RewardBreakdown compute_reward(double d_prev, double d_curr, const LidarScan& scan,
                                      const ActionCommand& action, TerminalKind terminal,
                                      const RewardParams& params) {
  if (!std::isfinite(d_prev) || !std::isfinite(d_curr) || !std::isfinite(action.v) ||
      !std::isfinite(action.omega))
    throw std::invalid_argument("compute_reward: non-finite input");
  for (double r : scan)
    if (!std::isfinite(r)) throw std::invalid_argument("compute_reward: non-finite scan");

  RewardBreakdown out;
  out.r_distance = params.w_distance * (d_prev - d_curr);

  double m = min_range(scan);
  if (m > 2.0 * params.d_threshold)
    out.r_collision = 0.0;
  else if (m > params.d_threshold)
    out.r_collision = params.r_c;
  else
    out.r_collision = 2.0 * params.r_c;

  double r_linear = action.v >= params.v_slow ? 0.0 : params.linear_penalty;
  double r_angular = std::abs(action.omega) <= params.omega_limit ? 0.0 : params.angular_penalty;
  out.r_velocity = r_linear + r_angular;

  if (terminal == TerminalKind::Arrived)
    out.r_arrive = params.r_success;
  else if (terminal == TerminalKind::Collided)
    out.r_arrive = params.r_fail;
  else
    out.r_arrive = 0.0;

  out.total = out.r_distance + out.r_collision + out.r_velocity + out.r_arrive;
  return out;
}

// ---------------------------------------------------------------------------
// Observation

inline std::pair<double, double> goal_polar(const Pose& pose, const Vec2& goal) {
  double dx = goal.x - pose.x;
  double dy = goal.y - pose.y;
  double dist = std::hypot(dx, dy);
  double bearing = dist == 0.0 ? 0.0 : wrap_angle(std::atan2(dy, dx) - pose.theta);
  return {dist, bearing};
}

inline Observation make_observation(const LidarScan& scan, std::pair<double, double> goal,
                                    const std::array<float, 2>& prev_action) {
  Observation obs;
  for (int i = 0; i < kLaserBeams; ++i)
    obs[i] = static_cast<float>(clamp(scan[i] / kLaserMax, 0.0, 1.0));
  obs[36] = static_cast<float>(clamp(goal.first / kGoalDistanceNorm, 0.0, 1.0));
  obs[37] = static_cast<float>(goal.second / kPi);
  obs[38] = prev_action[0];
  obs[39] = prev_action[1];
  return obs;
}

// ---------------------------------------------------------------------------
// Environment

// Episodic environment at a fixed control interval. Single-threaded; owns its
// RNG stream so independent instances can run concurrently with distinct seeds.
class Environment {
 public:
  Environment(WorldMap map, EpisodeConfig cfg, RewardParams rew, uint64_t seed)
      : map_(std::move(map)), cfg_(cfg), rew_(rew), rng_(seed, 0x51u) {
    cfg_.substeps();  // validate
  }

  const WorldMap& map() const { return map_; }
  const EpisodeConfig& config() const { return cfg_; }
  const RewardParams& reward_params() const { return rew_; }
  const Pose& pose() const { return pose_; }
  const Vec2& goal() const { return goal_; }
  const LidarScan& current_scan() const { return scan_; }
  int step_count() const { return steps_; }
  bool active() const { return active_; }
  Rng& rng() { return rng_; }

  /// Reset with explicit or sampled start/goal. Sampled draws come from the
  /// environment's own RNG stream.
  Observation reset(std::optional<Pose> start = std::nullopt,
                    std::optional<Vec2> goal = std::nullopt) {
    Pose s;
    Vec2 g;
    if (goal) {
      g = *goal;
      Pose gp{g.x, g.y, 0.0};
      if (check_collision(map_, gp, std::max(cfg_.robot_radius, 1e-6)))
        throw std::invalid_argument("env reset: goal not in free space with clearance");
    }
    if (start) {
      s = *start;
      s.theta = wrap_angle(s.theta);
      if (check_collision(map_, s, std::max(cfg_.robot_radius, 1e-6)))
        throw std::invalid_argument("env reset: start pose not in free space with clearance");
    } else {
      s = goal ? sample_start_away_from(g) : sample_start();
    }
    if (!goal) g = sample_goal_point(s);
    pose_ = s;
    goal_ = g;
    steps_ = 0;
    active_ = true;
    prev_action_ = {0.0f, 0.0f};
    d_prev_ = distance({pose_.x, pose_.y}, goal_);
    scan_ = scan_at(pose_);
    return make_observation(scan_, goal_polar(pose_, goal_), prev_action_);
  }

  StepOutcome step(const std::array<float, 2>& normalized_action) {
    if (!active_) throw std::logic_error("env step: episode is terminal, reset first");
    ActionCommand cmd = ActionCommand::from_normalized(normalized_action[0], normalized_action[1],
                                                       cfg_.v_max, cfg_.omega_max);
    TerminalKind kind = TerminalKind::None;
    int n = cfg_.substeps();
    Pose last_free = pose_;
    for (int i = 0; i < n; ++i) {
      Pose next = advance_substep(pose_, cmd.v, cmd.omega, cfg_.physics_substep);
      pose_ = next;
      if (check_collision(map_, pose_, cfg_.robot_radius)) {
        kind = TerminalKind::Collided;
        break;
      }
      last_free = pose_;
      if (distance({pose_.x, pose_.y}, goal_) < cfg_.arrival_distance) {
        kind = TerminalKind::Arrived;
        break;
      }
    }
    ++steps_;
    if (kind == TerminalKind::None && steps_ >= cfg_.max_control_steps) kind = TerminalKind::Timeout;

    // scan from the last pose whose center is in free space
    Pose scan_pose = map_.occupied_at(pose_.x, pose_.y) ? last_free : pose_;
    scan_ = scan_at(scan_pose);

    double d_curr = distance({pose_.x, pose_.y}, goal_);
    StepOutcome out;
    out.reward = compute_reward(d_prev_, d_curr, scan_, cmd, kind, rew_);
    out.terminal_kind = kind;
    out.done = kind != TerminalKind::None;
    prev_action_ = {static_cast<float>(cmd.a_v), static_cast<float>(cmd.a_w)};
    out.observation = make_observation(scan_, goal_polar(pose_, goal_), prev_action_);
    d_prev_ = d_curr;
    if (out.done) active_ = false;
    return out;
  }

  /// Uniform draw among free cells with the given clearance. Error if none.
  Vec2 sample_free_point(double min_clearance) {
    const std::vector<size_t>& eligible = eligible_cells(min_clearance);
    if (eligible.empty())
      throw std::runtime_error("sample: no free cell with requested clearance");
    size_t idx = eligible[rng_.uniform_index(eligible.size())];
    int cy = static_cast<int>(idx) / map_.width_cells;
    int cx = static_cast<int>(idx) % map_.width_cells;
    return map_.cell_center(cx, cy);
  }

 private:
  Pose sample_start() {
    Vec2 p = sample_free_point(std::max(cfg_.sample_clearance, cfg_.robot_radius));
    double theta = wrap_angle(rng_.uniform(-kPi, kPi));
    if (theta <= -kPi) theta = kPi;
    return {p.x, p.y, theta};
  }

  Vec2 sample_goal_point(const Pose& start) {
    for (int attempt = 0; attempt < 256; ++attempt) {
      Vec2 g = sample_free_point(std::max(cfg_.sample_clearance, cfg_.robot_radius));
      if (distance({start.x, start.y}, g) >= cfg_.min_goal_separation) return g;
    }
    throw std::runtime_error("sample: could not place goal away from start");
  }

  Pose sample_start_away_from(const Vec2& goal) {
    for (int attempt = 0; attempt < 256; ++attempt) {
      Pose s = sample_start();
      if (distance({s.x, s.y}, goal) >= cfg_.min_goal_separation) return s;
    }
    throw std::runtime_error("sample: could not place start away from goal");
  }

  LidarScan scan_at(const Pose& p) {
    LidarScan s = raycast(map_, p);
    if (cfg_.lidar_noise_sigma > 0.0) {
      for (double& r : s) r = clamp(r + rng_.normal(0.0, cfg_.lidar_noise_sigma), kLaserMin, kLaserMax);
    }
    return s;
  }

  const std::vector<size_t>& eligible_cells(double min_clearance) {
    auto it = eligible_cache_.find(min_clearance);
    if (it != eligible_cache_.end()) return it->second;
    std::vector<size_t> list;
    for (int cy = 0; cy < map_.height_cells; ++cy) {
      for (int cx = 0; cx < map_.width_cells; ++cx) {
        if (map_.occupied(cx, cy)) continue;
        Vec2 c = map_.cell_center(cx, cy);
        Pose p{c.x, c.y, 0.0};
        if (!check_collision(map_, p, min_clearance))
          list.push_back(static_cast<size_t>(cy) * map_.width_cells + cx);
      }
    }
    auto [ins, ok] = eligible_cache_.emplace(min_clearance, std::move(list));
    return ins->second;
  }

  WorldMap map_;
  EpisodeConfig cfg_;
  RewardParams rew_;
  Rng rng_;
  Pose pose_;
  Vec2 goal_;
  LidarScan scan_{};
  std::array<float, 2> prev_action_{0.0f, 0.0f};
  double d_prev_ = 0.0;
  int steps_ = 0;
  bool active_ = false;
  std::map<double, std::vector<size_t>> eligible_cache_;
};

}  // namespace navseed::sim

#endif  // NAVSEED_SIM_HPP
