#pragma once

#include <ostream>
#include <vector>

#include "asv/dynamics.hpp"

namespace asv {

/// One logged sample: pose, earth-relative body velocity and the applied
/// command of the first thruster.
struct TrajectoryRow {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  double thrust = 0.0;
  double angle = 0.5;
};

TrajectoryRow make_row(const SimState& s, const CurrentSpec& current, const ControlCommand& cmd);

/// Header `t,x,y,psi,u,v,r,thrust,angle`; shortest round-trip number formatting.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);

}  // namespace asv
