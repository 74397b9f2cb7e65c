#pragma once

#include <ostream>

#include "asv/world.hpp"

namespace asv {

/// One row per vertex: `kind,index,vertex,x,y` where kind is centerline,
/// left_bank, right_bank, section or obstacle.
void write_world_csv(std::ostream& out, const ObstacleWorld& world);

/// Top-down SVG (north up): channel sections, obstacles, centerline, spawn and goal.
void write_world_svg(std::ostream& out, const ObstacleWorld& world, double pixels_per_meter = 2.0);

}  // namespace asv
