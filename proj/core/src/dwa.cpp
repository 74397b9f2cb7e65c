#include "asv/dwa.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace asv {

void DwaConfig::validate() const {
  if (!(v_resolution > 0.0) || !(omega_resolution > 0.0)) {
    throw ValidationError("dwa: resolutions must be > 0");
  }
  if (!(rollout_dt > 0.0) || !(horizon >= rollout_dt)) {
    throw ValidationError("dwa: need horizon >= rollout_dt > 0");
  }
  if (!(gain_goal >= 0.0) || !(gain_obstacle >= 0.0) || !(gain_speed >= 0.0)) {
    throw ValidationError("dwa: weights must be >= 0");
  }
  if (!(v_min <= v_max)) throw ValidationError("dwa: v_min must be <= v_max");
  if (!(omega_max >= 0.0) || !(accel_v >= 0.0) || !(accel_omega >= 0.0)) {
    throw ValidationError("dwa: omega_max and acceleration limits must be >= 0");
  }
  if (!(d_threshold >= 0.0)) throw ValidationError("dwa: d_threshold must be >= 0");
}

namespace {

std::vector<double> axis(double lo, double hi, double res) {
  if (!(hi > lo)) return {lo};
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / res));
  for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * res);
  // Snap a last sample that lands on the endpoint up to rounding, else append it.
  if (hi - out.back() <= 1e-9 * res) {
    out.back() = hi;
  } else {
    out.push_back(hi);
  }
  return out;
}

std::pair<double, double> window_range(double current, double lo_bound, double hi_bound,
                                       double reach) {
  double lo = std::max(lo_bound, current - reach);
  double hi = std::min(hi_bound, current + reach);
  if (lo > hi) lo = hi = std::clamp(current, lo_bound, hi_bound);
  return {lo, hi};
}

}  // namespace

std::vector<VelocityPair> dynamic_window(double current_v, double current_omega,
                                         const DwaConfig& config, double window_dt) {
  config.validate();
  const auto [v_lo, v_hi] = window_range(current_v, config.v_min, config.v_max, config.accel_v * window_dt);
  const auto [w_lo, w_hi] = window_range(current_omega, -config.omega_max, config.omega_max,
                                         config.accel_omega * window_dt);
  std::vector<VelocityPair> out;
  for (const double v : axis(v_lo, v_hi, config.v_resolution)) {
    for (const double w : axis(w_lo, w_hi, config.omega_resolution)) out.push_back({v, w});
  }
  return out;
}

std::vector<Pose> rollout(double v, double omega, const Pose& start, double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon >= dt)) throw ValidationError("rollout: need horizon >= dt > 0");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<Pose> traj;
  traj.reserve(steps + 1);
  traj.push_back(start);
  Pose p = start;
  for (std::size_t k = 0; k < steps; ++k) {
    p.psi = wrap_angle(p.psi + omega * dt);
    p.x += v * std::cos(p.psi) * dt;
    p.y += v * std::sin(p.psi) * dt;
    traj.push_back(p);
  }
  return traj;
}

CostBreakdown score(std::span<const Pose> trajectory, double v, Vec2 goal,
                    std::span<const Vec2> obstacles, const DwaConfig& config) {
  if (trajectory.empty()) throw ValidationError("score: empty trajectory");
  CostBreakdown c;
  const Pose& end = trajectory.back();
  const Vec2 to_goal = goal - end.position();
  const double bearing = std::atan2(to_goal.y, to_goal.x);
  c.goal = config.gain_goal * std::abs(angle_diff(bearing, end.psi));

  double d2_min = std::numeric_limits<double>::infinity();
  for (const auto& p : trajectory) {
    for (const auto& o : obstacles) {
      const double dx = o.x - p.x;
      const double dy = o.y - p.y;
      d2_min = std::min(d2_min, dx * dx + dy * dy);
    }
  }
  c.d_min = std::sqrt(d2_min);
  c.obstacle = c.d_min > config.d_threshold ? config.gain_obstacle / c.d_min
                                            : std::numeric_limits<double>::infinity();
  c.speed = config.gain_speed * (config.v_max - v);
  c.total = c.goal + c.obstacle + c.speed;
  return c;
}

bool preferred(const Candidate& a, const Candidate& b) {
  if (a.cost.total != b.cost.total) return a.cost.total < b.cost.total;
  if (a.cmd.v != b.cmd.v) return a.cmd.v > b.cmd.v;
  return std::abs(a.cmd.omega) < std::abs(b.cmd.omega);
}

PlanResult plan_step(const Pose& pose, VelocityPair current, Vec2 goal,
                     std::span<const Vec2> obstacles, const DwaConfig& config, double window_dt) {
  PlanResult result;
  const auto window = dynamic_window(current.v, current.omega, config, window_dt);
  result.candidates.reserve(window.size());
  for (const auto& pair : window) {
    Candidate c;
    c.cmd = pair;
    c.trajectory = rollout(pair.v, pair.omega, pose, config.horizon, config.rollout_dt);
    c.cost = score(c.trajectory, pair.v, goal, obstacles, config);
    result.candidates.push_back(std::move(c));
  }

  bool found = false;
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const auto& c = result.candidates[i];
    if (!std::isfinite(c.cost.total)) continue;
    if (!found || preferred(c, result.candidates[result.best_index])) {
      result.best_index = i;
      found = true;
    }
  }
  if (!found) {
    throw NoFeasibleTrajectory(
        fmt::format("dwa: all {} candidates collide (d_threshold {})", window.size(), config.d_threshold));
  }
  result.cmd = result.best().cmd;
  return result;
}

namespace {

std::vector<Vec2> decimate(std::vector<Vec2> pts, double cell) {
  if (!(cell > 0.0)) return pts;
  std::set<std::pair<long long, long long>> seen;
  std::vector<Vec2> out;
  for (const auto& p : pts) {
    const auto key = std::make_pair(static_cast<long long>(std::floor(p.x / cell)),
                                    static_cast<long long>(std::floor(p.y / cell)));
    if (seen.insert(key).second) out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<Vec2> radar_to_obstacles(const RadarFrame& frame, double grid_cell) {
  const auto g = static_cast<std::size_t>(frame.size);
  if (frame.size < 1 || frame.pixels.size() != g * g || !(frame.extent.span.x > 0.0) ||
      !(frame.extent.span.y > 0.0)) {
    throw ValidationError("radar_to_obstacles: frame has no extent metadata");
  }
  std::vector<Vec2> pts;
  for (int y = 0; y < frame.size; ++y) {
    for (int x = 0; x < frame.size; ++x) {
      if (frame.at(x, y)) pts.push_back(frame.pixel_center(x, y));
    }
  }
  return decimate(std::move(pts), grid_cell);
}

std::vector<Vec2> radar_to_obstacles(const ScanFrame& scan, double grid_cell) {
  return decimate(scan.hits(), grid_cell);
}

}  // namespace asv
