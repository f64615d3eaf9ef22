#ifndef NAVSEED_ASTAR_HPP
#define NAVSEED_ASTAR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "navseed/map.hpp"
#include "navseed/sim.hpp"

namespace navseed::expert {

using sim::WorldMap;

struct PlannedPath {
  std::vector<Vec2> waypoints;  // cell centers, start to goal
  double total_length = 0.0;    // meters
  double cost_cells = 0.0;      // unit/sqrt(2) edge costs on the grid
};

class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Marks every cell whose center lies within `radius` of an occupied cell.
inline WorldMap inflate_obstacles(const WorldMap& map, double radius) {
  WorldMap out = map;
  int k = static_cast<int>(std::ceil(radius / map.resolution)) + 1;
  for (int cy = 0; cy < map.height_cells; ++cy) {
    for (int cx = 0; cx < map.width_cells; ++cx) {
      if (map.occupied(cx, cy)) continue;
      Vec2 c = map.cell_center(cx, cy);
      bool near = false;
      for (int oy = cy - k; oy <= cy + k && !near; ++oy)
        for (int ox = cx - k; ox <= cx + k && !near; ++ox)
          if (map.occupied(ox, oy) && point_cell_distance(map, c.x, c.y, ox, oy) <= radius)
            near = true;
      if (near) out.cells[static_cast<size_t>(cy) * map.width_cells + cx] = 1;
    }
  }
  return out;
}

namespace detail {

constexpr double kSqrt2 = 1.41421356237309514547;

struct GridNeighbors {
  // 8-connected, no corner cutting: diagonals need both orthogonal cells free
  template <typename Fn>
  static void visit(const WorldMap& m, int cx, int cy, Fn&& fn) {
    static constexpr int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int i = 0; i < 8; ++i) {
      int nx = cx + dx[i], ny = cy + dy[i];
      if (m.occupied(nx, ny)) continue;
      bool diagonal = dx[i] != 0 && dy[i] != 0;
      if (diagonal && (m.occupied(cx + dx[i], cy) || m.occupied(cx, cy + dy[i]))) continue;
      fn(nx, ny, diagonal ? kSqrt2 : 1.0);
    }
  }
};

inline double octile(int x0, int y0, int x1, int y1) {
  int dx = std::abs(x0 - x1), dy = std::abs(y0 - y1);
  return (dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy);
}

}  // namespace detail

/// Optimal 8-connected grid path on the inflated map, octile heuristic.
inline PlannedPath astar_plan(const WorldMap& map, Vec2 start, Vec2 goal, double inflate_radius) {
  WorldMap inflated = inflate_obstacles(map, inflate_radius);
  int sx = inflated.cell_x(start.x), sy = inflated.cell_y(start.y);
  int gx = inflated.cell_x(goal.x), gy = inflated.cell_y(goal.y);
  if (inflated.occupied(sx, sy)) throw NoPathError("astar: start not free after inflation");
  if (inflated.occupied(gx, gy)) throw NoPathError("astar: goal not free after inflation");

  const int w = inflated.width_cells, h = inflated.height_cells;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<uint8_t> closed(n, 0);

  auto idx = [w](int x, int y) { return static_cast<size_t>(y) * w + x; };

  // (f, g, cell) with deterministic ordering
  using Entry = std::tuple<double, double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  g[idx(sx, sy)] = 0.0;
  open.emplace(detail::octile(sx, sy, gx, gy), 0.0, static_cast<int>(idx(sx, sy)));

  size_t goal_idx = idx(gx, gy);
  while (!open.empty()) {
    auto [f, gc, cell] = open.top();
    open.pop();
    if (closed[cell]) continue;
    closed[cell] = 1;
    if (static_cast<size_t>(cell) == goal_idx) break;
    int cx = cell % w, cy = cell / w;
    detail::GridNeighbors::visit(inflated, cx, cy, [&](int nx, int ny, double cost) {
      size_t ni = idx(nx, ny);
      double ng = g[cell] + cost;
      if (ng < g[ni]) {
        g[ni] = ng;
        parent[ni] = cell;
        open.emplace(ng + detail::octile(nx, ny, gx, gy), ng, static_cast<int>(ni));
      }
    });
  }

  if (!closed[goal_idx]) throw NoPathError("astar: goal unreachable");

  PlannedPath path;
  path.cost_cells = g[goal_idx];
  std::vector<int> cells;
  for (int c = static_cast<int>(goal_idx); c != -1; c = parent[c]) cells.push_back(c);
  std::reverse(cells.begin(), cells.end());
  path.waypoints.reserve(cells.size());
  for (int c : cells) path.waypoints.push_back(inflated.cell_center(c % w, c / w));
  for (size_t i = 1; i < path.waypoints.size(); ++i)
    path.total_length += distance(path.waypoints[i - 1], path.waypoints[i]);
  return path;
}

// Controller-facing variant: the robot may legitimately sit inside the
// inflation band mid-episode, so relax the start to the nearest inflated-free
// cell (ring search, up to `max_snap` meters) before planning.
inline PlannedPath astar_plan_from_nearest_free(const WorldMap& map, Vec2 start, Vec2 goal,
                                                double inflate_radius, double max_snap = 0.6) {
  WorldMap inflated = inflate_obstacles(map, inflate_radius);
  int sx = inflated.cell_x(start.x), sy = inflated.cell_y(start.y);
  if (inflated.occupied(sx, sy)) {
    int max_r = static_cast<int>(std::ceil(max_snap / map.resolution));
    bool found = false;
    double best = 1e30;
    for (int r = 1; r <= max_r && !found; ++r) {
      int bx = sx, by = sy;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
          int nx = sx + dx, ny = sy + dy;
          if (inflated.occupied(nx, ny)) continue;
          Vec2 c = inflated.cell_center(nx, ny);
          double d = distance(start, c);
          if (d < best) {
            best = d;
            bx = nx;
            by = ny;
            found = true;
          }
        }
      if (found) {
        start = inflated.cell_center(bx, by);
        break;
      }
    }
    if (!found) throw NoPathError("astar: no free cell near start");
  }
  return astar_plan(map, start, goal, inflate_radius);
}

}  // namespace navseed::expert

#endif  // NAVSEED_ASTAR_HPP
