#ifndef NAVSEED_DWA_HPP
#define NAVSEED_DWA_HPP

#include <cmath>
#include <vector>

#include "navseed/astar.hpp"
#include "navseed/sim.hpp"

namespace navseed::expert {

using sim::ActionCommand;
using sim::EpisodeConfig;
using sim::LidarScan;
using sim::Pose;

struct DWAConfig {
  int v_samples = 7;
  int w_samples = 15;
  double horizon = 1.5;             // seconds of forward simulation
  double sim_dt = 0.05;
  double weight_heading = 0.8;
  double weight_clearance = 0.2;
  double weight_velocity = 0.1;
  double accel_v = 0.5;             // m/s^2
  double accel_w = 3.0;             // rad/s^2
  double lookahead = 0.45;          // path target distance ahead of the robot
  double clearance_cap = 1.0;       // clearance saturates here for scoring
  double safety_margin = 0.04;      // added to robot radius for candidate rejection
  double target_stop_radius = 0.15; // candidate simulation ends on reaching the target
  double clearance_floor = 0.005;   // legality bound when already inside the margin band
};

struct VelocityState {
  double v = 0.0;
  double omega = 0.0;
};

/// Waypoint roughly `lookahead` meters further along the path than the robot.
inline Vec2 path_target(const PlannedPath& path, const Pose& pose, double lookahead) {
  const auto& wps = path.waypoints;
  size_t nearest = 0;
  double best = 1e30;
  for (size_t i = 0; i < wps.size(); ++i) {
    double d = distance({pose.x, pose.y}, wps[i]);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  double acc = 0.0;
  for (size_t i = nearest + 1; i < wps.size(); ++i) {
    acc += distance(wps[i - 1], wps[i]);
    if (acc >= lookahead) return wps[i];
  }
  return wps.back();
}

namespace detail {

// Obstacle points from the scan, in the world frame. Beams at max range are
// misses. Adjacent hits on the same surface get two interpolated points each
// so a 10 degree beam spacing does not under-sample nearby walls.
inline std::vector<Vec2> scan_obstacles(const Pose& pose, const LidarScan& scan) {
  const size_t n = scan.size();
  std::vector<Vec2> pts;
  pts.reserve(3 * n);
  auto point = [&](size_t k) {
    double a = pose.theta + static_cast<double>(k) * (2.0 * kPi / n);
    return Vec2{pose.x + scan[k] * std::cos(a), pose.y + scan[k] * std::sin(a)};
  };
  for (size_t k = 0; k < n; ++k) {
    if (scan[k] >= sim::kLaserMax - 1e-9) continue;
    Vec2 p = point(k);
    pts.push_back(p);
    size_t next = (k + 1) % n;
    if (scan[next] < sim::kLaserMax - 1e-9 && std::abs(scan[next] - scan[k]) < 0.3) {
      Vec2 q = point(next);
      pts.push_back({p.x + (q.x - p.x) / 3.0, p.y + (q.y - p.y) / 3.0});
      pts.push_back({p.x + 2.0 * (q.x - p.x) / 3.0, p.y + 2.0 * (q.y - p.y) / 3.0});
    }
  }
  return pts;
}

struct TrajectoryScore {
  bool collides = false;
  bool reached_target = false;
  double min_clearance = 0.0;  // normalized to [0, 1]
  Pose end;
};

// `reject_below` is the clearance a trajectory point must keep. It is the
// safety margin normally, but never more than the clearance the robot already
// has: a robot inside the margin band may still pick escape candidates.
inline TrajectoryScore simulate_candidate(const Pose& start, double v, double w,
                                          const std::vector<Vec2>& obstacles,
                                          const DWAConfig& cfg, double robot_radius,
                                          const Vec2& target, double reject_below) {
  TrajectoryScore out;
  out.min_clearance = cfg.clearance_cap;
  Pose p = start;
  int steps = static_cast<int>(std::round(cfg.horizon / cfg.sim_dt));
  for (int i = 0; i < steps; ++i) {
    p = sim::advance_substep(p, v, w, cfg.sim_dt);
    for (const Vec2& ob : obstacles) {
      double d = distance({p.x, p.y}, ob) - robot_radius;
      if (d < reject_below) {
        out.collides = true;
        return out;
      }
      if (d < out.min_clearance) out.min_clearance = d;
    }
    if (distance({p.x, p.y}, target) < cfg.target_stop_radius) {
      out.reached_target = true;  // no point simulating past the steering target
      break;
    }
  }
  out.min_clearance = clamp(out.min_clearance / cfg.clearance_cap, 0.0, 1.0);
  out.end = p;
  return out;
}

}  // namespace detail

// Dynamic-window step: sample reachable (v, w), simulate over the horizon,
// drop colliding candidates, score the rest by heading alignment toward the
// path target, clearance, and speed. Ties go to larger v, then smaller |w|.
inline ActionCommand dwa_control(const Pose& pose, const VelocityState& vel,
                                 const PlannedPath& path, const LidarScan& scan,
                                 const DWAConfig& cfg, const EpisodeConfig& env_cfg) {
  if (path.waypoints.empty()) throw std::invalid_argument("dwa: empty path");
  const double dt = env_cfg.control_interval;
  double v_lo = std::max(0.0, vel.v - cfg.accel_v * dt);
  double v_hi = std::min(env_cfg.v_max, vel.v + cfg.accel_v * dt);
  double w_lo = std::max(-env_cfg.omega_max, vel.omega - cfg.accel_w * dt);
  double w_hi = std::min(env_cfg.omega_max, vel.omega + cfg.accel_w * dt);

  Vec2 target = path_target(path, pose, cfg.lookahead);
  std::vector<Vec2> obstacles = detail::scan_obstacles(pose, scan);
  double current_clearance = cfg.clearance_cap;
  for (const Vec2& ob : obstacles)
    current_clearance =
        std::min(current_clearance, distance({pose.x, pose.y}, ob) - env_cfg.robot_radius);
  // normally candidates must keep the safety margin; a robot already inside
  // the band may maneuver down to the physical floor so it can escape
  double reject_below = current_clearance >= cfg.safety_margin
                            ? cfg.safety_margin
                            : std::min(cfg.clearance_floor, std::max(0.0, current_clearance - 1e-9));

  bool found = false;
  double best_score = 0.0, best_v = 0.0, best_w = 0.0;
  for (int i = 0; i < cfg.v_samples; ++i) {
    double v = cfg.v_samples == 1 ? v_lo : v_lo + (v_hi - v_lo) * i / (cfg.v_samples - 1);
    for (int j = 0; j < cfg.w_samples; ++j) {
      double w = cfg.w_samples == 1 ? w_lo : w_lo + (w_hi - w_lo) * j / (cfg.w_samples - 1);
      if (v == 0.0 && w == 0.0) continue;  // a candidate that does not move cannot progress
      auto tr = detail::simulate_candidate(pose, v, w, obstacles, cfg, env_cfg.robot_radius,
                                           target, reject_below);
      if (tr.collides) continue;
      auto [dist_t, bearing] = sim::goal_polar(tr.end, target);
      (void)dist_t;
      double heading = tr.reached_target ? 1.0 : 1.0 - std::abs(bearing) / kPi;
      double score = cfg.weight_heading * heading + cfg.weight_clearance * tr.min_clearance +
                     cfg.weight_velocity * (v / env_cfg.v_max);
      bool take = !found || score > best_score ||
                  (score == best_score &&
                   (v > best_v || (v == best_v && std::abs(w) < std::abs(best_w))));
      if (take) {
        found = true;
        best_score = score;
        best_v = v;
        best_w = w;
      }
    }
  }

  if (!found) {
    // everything collides: stop and rotate toward the next waypoint
    auto [d, bearing] = sim::goal_polar(pose, target);
    (void)d;
    double w = clamp(bearing / dt, -env_cfg.omega_max, env_cfg.omega_max);
    return ActionCommand::from_physical(0.0, w, env_cfg.v_max, env_cfg.omega_max);
  }
  return ActionCommand::from_physical(best_v, best_w, env_cfg.v_max, env_cfg.omega_max);
}

}  // namespace navseed::expert

#endif  // NAVSEED_DWA_HPP
