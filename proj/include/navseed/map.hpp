#ifndef NAVSEED_MAP_HPP
#define NAVSEED_MAP_HPP

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "navseed/common.hpp"

namespace navseed::sim {

// Occupancy grid. Row 0 of the backing store is the lowest y band; map files
// list rows top to bottom, so the parser reverses them. Cell (cx, cy) covers
// the world rectangle [origin + c*res, origin + (c+1)*res).
struct WorldMap {
  int width_cells = 0;
  int height_cells = 0;
  double resolution = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<uint8_t> cells;  // row-major from bottom row, 1 = occupied

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cy >= 0 && cx < width_cells && cy < height_cells;
  }

  // Out-of-bounds counts as occupied: the world is closed.
  bool occupied(int cx, int cy) const {
    if (!in_bounds(cx, cy)) return true;
    return cells[static_cast<size_t>(cy) * width_cells + cx] != 0;
  }

  int cell_x(double wx) const { return static_cast<int>(std::floor((wx - origin_x) / resolution)); }
  int cell_y(double wy) const { return static_cast<int>(std::floor((wy - origin_y) / resolution)); }

  bool occupied_at(double wx, double wy) const { return occupied(cell_x(wx), cell_y(wy)); }

  Vec2 cell_center(int cx, int cy) const {
    return {origin_x + (cx + 0.5) * resolution, origin_y + (cy + 0.5) * resolution};
  }

  double world_width() const { return width_cells * resolution; }
  double world_height() const { return height_cells * resolution; }
};

class MapParseError : public std::runtime_error {
 public:
  MapParseError(int line, const std::string& what)
      : std::runtime_error("map parse error at line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Parses the line-oriented navmap text format:
//   navmap v1
//   res <meters-per-cell>
//   size <width> <height>
//   <height> rows of <width> chars, '#' occupied / '.' free, top row first
inline WorldMap load_map(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw MapParseError(lineno + 1, std::string("missing ") + what);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("header");
  if (line != "navmap v1") throw MapParseError(lineno, "expected 'navmap v1'");

  next_line("resolution");
  WorldMap map;
  {
    std::istringstream ls(line);
    std::string key;
    ls >> key >> map.resolution;
    if (key != "res" || ls.fail() || map.resolution <= 0.0)
      throw MapParseError(lineno, "expected 'res <meters-per-cell>' with res > 0");
  }

  next_line("size");
  {
    std::istringstream ls(line);
    std::string key;
    ls >> key >> map.width_cells >> map.height_cells;
    if (key != "size" || ls.fail() || map.width_cells <= 0 || map.height_cells <= 0)
      throw MapParseError(lineno, "expected 'size <width> <height>' with positive dims");
  }

  map.cells.assign(static_cast<size_t>(map.width_cells) * map.height_cells, 0);
  for (int r = 0; r < map.height_cells; ++r) {
    next_line("map row");
    if (static_cast<int>(line.size()) != map.width_cells)
      throw MapParseError(lineno, "ragged row: got " + std::to_string(line.size()) +
                                      " cells, expected " + std::to_string(map.width_cells));
    int cy = map.height_cells - 1 - r;  // file lists the top row first
    for (int cx = 0; cx < map.width_cells; ++cx) {
      char c = line[cx];
      if (c == '#')
        map.cells[static_cast<size_t>(cy) * map.width_cells + cx] = 1;
      else if (c != '.')
        throw MapParseError(lineno, std::string("unknown cell character '") + c + "'");
    }
  }

  for (int cx = 0; cx < map.width_cells; ++cx) {
    if (!map.occupied(cx, 0) || !map.occupied(cx, map.height_cells - 1))
      throw MapParseError(lineno, "open boundary: top/bottom rows must be occupied");
  }
  for (int cy = 0; cy < map.height_cells; ++cy) {
    if (!map.occupied(0, cy) || !map.occupied(map.width_cells - 1, cy))
      throw MapParseError(lineno, "open boundary: left/right columns must be occupied");
  }
  return map;
}

inline std::string map_to_text(const WorldMap& map) {
  std::string out = "navmap v1\nres " + format_number(map.resolution) + "\nsize " +
                    std::to_string(map.width_cells) + " " + std::to_string(map.height_cells) + "\n";
  for (int r = 0; r < map.height_cells; ++r) {
    int cy = map.height_cells - 1 - r;
    for (int cx = 0; cx < map.width_cells; ++cx) out += map.occupied(cx, cy) ? '#' : '.';
    out += '\n';
  }
  return out;
}

// Distance from a point to the closed rectangle of cell (cx, cy).
inline double point_cell_distance(const WorldMap& map, double wx, double wy, int cx, int cy) {
  double x0 = map.origin_x + cx * map.resolution;
  double y0 = map.origin_y + cy * map.resolution;
  double x1 = x0 + map.resolution;
  double y1 = y0 + map.resolution;
  double dx = wx < x0 ? x0 - wx : (wx > x1 ? wx - x1 : 0.0);
  double dy = wy < y0 ? y0 - wy : (wy > y1 ? wy - y1 : 0.0);
  return std::hypot(dx, dy);
}

// Per-cell clearance field: distance from each cell center to the nearest
// occupied cell rectangle. Used by the local planner for fast clearance
// lookups; exact collision tests use point_cell_distance directly.
class DistanceField {
 public:
  explicit DistanceField(const WorldMap& map) : map_(&map), dist_(map.cells.size(), 0.0) {
    std::vector<std::pair<int, int>> occ;
    for (int cy = 0; cy < map.height_cells; ++cy)
      for (int cx = 0; cx < map.width_cells; ++cx)
        if (map.occupied(cx, cy)) occ.emplace_back(cx, cy);
    // brute force; maps are desk scale and this runs once per map
    for (int cy = 0; cy < map.height_cells; ++cy) {
      for (int cx = 0; cx < map.width_cells; ++cx) {
        size_t idx = static_cast<size_t>(cy) * map.width_cells + cx;
        if (map.occupied(cx, cy)) {
          dist_[idx] = 0.0;
          continue;
        }
        Vec2 c = map.cell_center(cx, cy);
        double best = 1e30;
        for (auto& [ox, oy] : occ) {
          double dxc = (std::abs(ox - cx) - 1) * map.resolution;
          double dyc = (std::abs(oy - cy) - 1) * map.resolution;
          double lower = std::max(0.0, std::max(dxc, dyc));
          if (lower * lower >= best * best) continue;
          double d = point_cell_distance(*map_, c.x, c.y, ox, oy);
          if (d < best) best = d;
        }
        dist_[idx] = best;
      }
    }
  }

  /// Clearance at a world point, looked up from the cell the point is in.
  double clearance(double wx, double wy) const {
    int cx = map_->cell_x(wx);
    int cy = map_->cell_y(wy);
    if (!map_->in_bounds(cx, cy)) return 0.0;
    return dist_[static_cast<size_t>(cy) * map_->width_cells + cx];
  }

 private:
  const WorldMap* map_;
  std::vector<double> dist_;
};

}  // namespace navseed::sim

#endif  // NAVSEED_MAP_HPP
