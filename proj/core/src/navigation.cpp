#include "asv/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace asv {

void NavigatorConfig::validate() const {
  dwa.validate();
  if (!(dt > 0.0) || !(control_period >= dt) || !(plan_period >= control_period)) {
    throw ValidationError("navigator: need plan_period >= control_period >= dt > 0");
  }
  if (!(max_time > 0.0)) throw ValidationError("navigator: max_time must be > 0");
  if (!(goal_radius > 0.0)) throw ValidationError("navigator: goal_radius must be > 0");
  if (n_beams < 1 || !(sensor_range > 0.0)) {
    throw ValidationError("navigator: need n_beams >= 1 and sensor_range > 0");
  }
  if (!(footprint_radius >= 0.0) || !(decimation >= 0.0) || !(waypoint_lookahead >= 0.0)) {
    throw ValidationError("navigator: footprint_radius, decimation and lookahead must be >= 0");
  }
  radar.validate();
}

const char* to_string(NavOutcome o) {
  switch (o) {
    case NavOutcome::goal: return "goal";
    case NavOutcome::collision: return "collision";
    case NavOutcome::timeout: return "timeout";
    case NavOutcome::infeasible: return "infeasible";
  }
  return "unknown";
}

std::vector<Vec2> global_path(const ObstacleWorld& world) {
  std::vector<Vec2> path;
  if (world.channel()) {
    const auto& c = world.channel()->centerline;
    path.assign(c.begin() + 1, c.end());
  }
  if (path.empty() || !(path.back() == world.goal())) path.push_back(world.goal());
  return path;
}

namespace {

int ratio(double big, double small) {
  return std::max(1, static_cast<int>(std::lround(big / small)));
}

double clearance(const ObstacleWorld& world, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : world.segments()) d = std::min(d, point_segment_distance(p, s));
  return d;
}

}  // namespace

NavResult navigate(const ObstacleWorld& world, const VesselParams& params,
                   const NavigatorConfig& config, const ThrustSpeedTable& table) {
  config.validate();
  const VelocityTracker tracker(params, table, config.tracker);
  const double footprint =
      config.footprint_radius > 0.0 ? config.footprint_radius : params.footprint_radius();
  const CurrentSpec& current = world.current();
  const WindForce& wind = world.wind();

  const int ticks_per_plan = ratio(config.plan_period, config.control_period);
  const int substeps = ratio(config.control_period, config.dt);
  const double dt = config.control_period / substeps;
  const auto max_ticks = static_cast<long>(std::ceil(config.max_time / config.control_period));

  RadarConfig radar = config.radar;
  radar.max_range = config.sensor_range;
  radar.extent_mode = ExtentMode::fixed_metric;

  const std::vector<Vec2> path = global_path(world);
  std::size_t wp = 0;
  Vec2 wp_from = world.spawn().position();

  NavResult result;
  result.min_clearance = clearance(world, world.spawn().position());
  SimState s = state_from_absolute(world.spawn(), {}, current);
  VelocityPair planned;

  for (long tick = 0;; ++tick) {
    const Vec2 pos = s.pose.position();
    const BodyVelocity nu = absolute_velocity(s, current);
    if (norm(world.goal() - pos) <= config.goal_radius) {
      result.outcome = NavOutcome::goal;
      result.trajectory.push_back(make_row(s, current, ControlCommand::neutral(1)));
      break;
    }
    if (tick >= max_ticks) {
      result.outcome = NavOutcome::timeout;
      result.message = fmt::format("goal not reached within {} s", config.max_time);
      break;
    }

    if (tick % ticks_per_plan == 0) {
      while (wp + 1 < path.size()) {
        const Vec2 seg = path[wp] - wp_from;
        const double len = norm(seg);
        const double along = len > 0.0 ? dot(pos - path[wp], (1.0 / len) * seg) : 0.0;
        if (along < -config.waypoint_lookahead) break;
        wp_from = path[wp];
        ++wp;
      }

      const ScanFrame scan = raycast_scan(world, s.pose, config.n_beams, config.sensor_range, s.t);
      std::vector<Vec2> obstacles;
      if (config.source == ObstacleSource::radar) {
        const auto hits = scan.hits();
        obstacles = radar_to_obstacles(rasterize(hits, radar, pos, s.t), config.decimation);
      } else {
        obstacles = radar_to_obstacles(scan, config.decimation);
      }

      try {
        const PlanResult plan =
            plan_step(s.pose, {nu.u, nu.r}, path[wp], obstacles, config.dwa, config.plan_period);
        planned = plan.cmd;
        if (config.record_candidates) {
          for (std::size_t i = 0; i < plan.candidates.size(); ++i) {
            const auto& c = plan.candidates[i];
            result.candidates.push_back(
                {result.plan_steps, s.t, c.cmd.v, c.cmd.omega, c.cost, i == plan.best_index});
          }
        }
      } catch (const NoFeasibleTrajectory& e) {
        result.outcome = NavOutcome::infeasible;
        result.failed_step = result.plan_steps;
        result.message = fmt::format("plan step {} (t={}): {}", result.plan_steps, s.t, e.what());
        break;
      }
      ++result.plan_steps;
    }

    const ControlCommand cmd = tracker.command(planned.v, planned.omega, nu.r);
    result.trajectory.push_back(make_row(s, current, cmd));
    const Vec3 tau = thruster_allocation(cmd, params);
    for (int k = 0; k < substeps; ++k) {
      s = step_with_force(s, tau, current, wind, params, dt);
      result.min_clearance = std::min(result.min_clearance, clearance(world, s.pose.position()));
      if (collision_check(world, s.pose, footprint)) ++result.collision_hits;
    }
    if (result.collision_hits > 0) {
      result.outcome = NavOutcome::collision;
      result.message = fmt::format("collision at t={} ({}, {})", s.t, s.pose.x, s.pose.y);
      result.trajectory.push_back(make_row(s, current, cmd));
      break;
    }
  }
  return result;
}

void write_candidates_csv(std::ostream& out, const std::vector<CandidateRow>& rows) {
  out << "step,t,v,omega,cost_goal,cost_obstacle,cost_speed,cost_total,d_min,chosen\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.plan_step, r.t, r.v, r.omega, r.cost.goal,
               r.cost.obstacle, r.cost.speed, r.cost.total, r.cost.d_min, r.chosen ? 1 : 0);
  }
}

}  // namespace asv
