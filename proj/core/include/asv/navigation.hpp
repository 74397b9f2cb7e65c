// Closed-loop DWA navigation: sense, plan at a fixed period, track the planned
// (v, omega) with the low-level controllers and integrate the vessel dynamics.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asv/control.hpp"
#include "asv/dwa.hpp"
#include "asv/radar.hpp"
#include "asv/trajectory.hpp"
#include "asv/world.hpp"

namespace asv {

enum class ObstacleSource { radar, scan };

struct NavigatorConfig {
  DwaConfig dwa;
  double plan_period = 1.0;     // also the dynamic-window dt
  double control_period = 0.1;  // yaw-rate loop
  double dt = kDefaultDt;
  double max_time = 600.0;
  double goal_radius = 5.0;
  /// A waypoint is released once the vessel is within this along-track
  /// distance of it.
  double waypoint_lookahead = 15.0;
  ObstacleSource source = ObstacleSource::radar;
  int n_beams = 360;
  double sensor_range = 60.0;
  RadarConfig radar{256, 0.03, 0.02, 60.0, 36.0, ExtentMode::fixed_metric};
  double decimation = 1.0;  // obstacle grid cell [m], 0 keeps every point
  /// Collision disc radius; 0 uses half the vessel length.
  double footprint_radius = 0.0;
  VelocityTrackerGains tracker;
  bool record_candidates = false;

  void validate() const;
};

enum class NavOutcome { goal, collision, timeout, infeasible };
const char* to_string(NavOutcome o);

struct CandidateRow {
  std::size_t plan_step = 0;
  double t = 0.0;
  double v = 0.0;
  double omega = 0.0;
  CostBreakdown cost;
  bool chosen = false;
};

struct NavResult {
  NavOutcome outcome = NavOutcome::timeout;
  std::vector<TrajectoryRow> trajectory;  // one row per control tick
  std::vector<CandidateRow> candidates;   // filled when record_candidates is set
  std::size_t plan_steps = 0;
  std::size_t collision_hits = 0;
  std::optional<std::size_t> failed_step;  // plan step that had no feasible candidate
  double min_clearance = 0.0;              // closest obstacle-segment distance seen
  std::string message;
};

/// Path the planner follows: the channel centerline past the spawn when the
/// world has one, then the goal.
std::vector<Vec2> global_path(const ObstacleWorld& world);

NavResult navigate(const ObstacleWorld& world, const VesselParams& params,
                   const NavigatorConfig& config, const ThrustSpeedTable& table);

void write_candidates_csv(std::ostream& out, const std::vector<CandidateRow>& rows);

}  // namespace asv
