// Dynamic Window Approach local planner.
//
// Candidate (v, omega) pairs reachable within one planning period are rolled
// out as constant-curvature arcs and scored with
//
//   C_total = C_goal + C_obstacle + C_speed
//   C_goal     = G_goal * |wrap(bearing_to_goal - heading)|   at the arc endpoint
//   C_obstacle = G_obstacle / d_min if d_min > d_threshold, +inf otherwise
//   C_speed    = G_speed * (v_max - v)
#pragma once

#include <limits>
#include <span>
#include <vector>

#include "asv/dynamics.hpp"
#include "asv/radar.hpp"
#include "asv/world.hpp"

namespace asv {

struct DwaConfig {
  double v_max = 1.5;
  double v_min = 0.0;
  double omega_max = 0.2;
  double accel_v = 0.2;
  double accel_omega = 0.1;
  double v_resolution = 0.1;
  double omega_resolution = 0.02;
  double horizon = 12.0;
  double rollout_dt = 0.5;
  double gain_goal = 1.0;
  double gain_obstacle = 4.0;
  double gain_speed = 0.5;
  double d_threshold = 2.5;

  void validate() const;
};

struct VelocityPair {
  double v = 0.0;
  double omega = 0.0;
  friend bool operator==(const VelocityPair&, const VelocityPair&) = default;
};

struct CostBreakdown {
  double goal = 0.0;
  double obstacle = 0.0;
  double speed = 0.0;
  double total = 0.0;
  double d_min = std::numeric_limits<double>::infinity();
};

struct Candidate {
  VelocityPair cmd;
  std::vector<Pose> trajectory;
  CostBreakdown cost;
};

/// Velocity grid over the window reachable in window_dt, endpoints included.
/// v varies slowest; pairs are ordered by v then omega, both ascending.
std::vector<VelocityPair> dynamic_window(double current_v, double current_omega,
                                         const DwaConfig& config, double window_dt);

/// Constant (v, omega) arc: psi += omega dt, then x += v cos(psi) dt, y += v sin(psi) dt,
/// for ceil(horizon / dt) steps. The start pose is the first element.
std::vector<Pose> rollout(double v, double omega, const Pose& start, double horizon, double dt);

CostBreakdown score(std::span<const Pose> trajectory, double v, Vec2 goal,
                    std::span<const Vec2> obstacles, const DwaConfig& config);

/// Deterministic preference: lower total, then higher v, then |omega| closer to
/// 0. Returns false on a full tie (enumeration order decides).
bool preferred(const Candidate& a, const Candidate& b);

struct PlanResult {
  VelocityPair cmd;
  std::size_t best_index = 0;
  std::vector<Candidate> candidates;

  const Candidate& best() const { return candidates[best_index]; }
};

/// Scores every window pair and returns the preferred one. Throws
/// NoFeasibleTrajectory if every candidate collides.
PlanResult plan_step(const Pose& pose, VelocityPair current, Vec2 goal,
                     std::span<const Vec2> obstacles, const DwaConfig& config, double window_dt);

/// Set pixels mapped back to metric pixel centers, optionally decimated so
/// that at most one point survives per grid_cell x grid_cell meter cell.
std::vector<Vec2> radar_to_obstacles(const RadarFrame& frame, double grid_cell = 0.0);
std::vector<Vec2> radar_to_obstacles(const ScanFrame& scan, double grid_cell = 0.0);

}  // namespace asv
