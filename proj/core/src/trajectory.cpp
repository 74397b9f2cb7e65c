#include "asv/trajectory.hpp"

#include <fmt/ostream.h>

namespace asv {

TrajectoryRow make_row(const SimState& s, const CurrentSpec& current, const ControlCommand& cmd) {
  const BodyVelocity nu = absolute_velocity(s, current);
  TrajectoryRow row{s.t, s.pose.x, s.pose.y, s.pose.psi, nu.u, nu.v, nu.r, 0.0, 0.5};
  if (cmd.size() > 0) {
    row.thrust = cmd.channels()[0].thrust;
    row.angle = cmd.channels()[0].angle;
  }
  return row;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "t,x,y,psi,u,v,r,thrust,angle\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", r.t, r.x, r.y, r.psi, r.u, r.v, r.r, r.thrust,
               r.angle);
  }
}

}  // namespace asv
