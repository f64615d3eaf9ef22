#ifndef NAVSEED_MAPS_HPP
#define NAVSEED_MAPS_HPP

#include <string>
#include <string_view>

#include "navseed/map.hpp"

namespace navseed::sim {

// Embedded maps: corridor is the training world, the rest are held-out
// evaluation worlds.
inline constexpr std::string_view k_map_corridor = R"MAP(navmap v1
res 0.1
size 120 40
########################################################################################################################
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#...........................................................................######.....................................#
#...........................................................................######.....................................#
#...........................................................................######.....................................#
#...........................................................................######.....................................#
#...........................................................................######.....................................#
#...........................................................................######.....................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#.....................................######...........................................................................#
#.....................................######...........................................................................#
#.....................................######...........................................................................#
#.....................................######...........................................................................#
#.....................................######...........................................................................#
#.....................................######...........................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
########################################################################################################################
)MAP";

inline constexpr std::string_view k_map_house = R"MAP(navmap v1
res 0.1
size 100 80
####################################################################################################
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
############................########################...............................................#
############................########################...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#..................................................................................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
#.................................................##...............................................#
####################################################################################################
)MAP";

inline constexpr std::string_view k_map_office = R"MAP(navmap v1
res 0.1
size 120 90
########################################################################################################################
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#.......................................................########.......................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#.......................##############..........................................##############.........................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
########################################################################################################################
)MAP";

inline constexpr std::string_view k_map_maze = R"MAP(navmap v1
res 0.1
size 120 120
########################################################################################################################
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
###############################################################################################........................#
###############################################################################################........................#
###############################################################################################........................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#........................###############################################################################################
#........................###############################################################################################
#........................###############################################################################################
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
###############################################################################################........................#
###############################################################################################........................#
###############################################################################################........................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
#......................................................................................................................#
########################################################################################################################
)MAP";

inline std::string_view embedded_map_text(const std::string& name) {
  if (name == "corridor") return k_map_corridor;
  if (name == "house") return k_map_house;
  if (name == "office") return k_map_office;
  if (name == "maze") return k_map_maze;
  throw std::invalid_argument("unknown embedded map: " + name);
}

inline WorldMap load_embedded_map(const std::string& name) {
  return load_map(std::string(embedded_map_text(name)));
}

}  // namespace navseed::sim

#endif  // NAVSEED_MAPS_HPP