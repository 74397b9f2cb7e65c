#include "asv/control.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace asv {

Pid::Pid(double kp, double ki, double kd, double out_min, double out_max)
    : kp_(kp), ki_(ki), kd_(kd), out_min_(out_min), out_max_(out_max) {
  if (!(out_min <= out_max)) throw ValidationError("pid: out_min must be <= out_max");
}

double Pid::compute(double setpoint, double measured, double dt) {
  if (!(dt > 0.0)) throw ValidationError("pid: dt must be > 0");
  const double error = setpoint - measured;
  integral_ += error * dt;
  const double derivative = has_prev_ ? (error - prev_error_) / dt : 0.0;
  prev_error_ = error;
  has_prev_ = true;
  return std::clamp(kp_ * error + ki_ * integral_ + kd_ * derivative, out_min_, out_max_);
}

void Pid::reset() {
  integral_ = 0.0;
  prev_error_ = 0.0;
  has_prev_ = false;
}

double ground_speed(const SimState& s, const CurrentSpec& current) {
  const BodyVelocity nu = absolute_velocity(s, current);
  return std::hypot(nu.u, nu.v);
}

namespace {

// Straight-line steady surge speed under a constant normalized thrust.
double steady_speed(const VesselParams& params, double thrust, double dt) {
  const auto cmd = ControlCommand::uniform(params.thrusters.size(), thrust, 0.5);
  const Vec3 tau = thruster_allocation(cmd, params);
  SimState s;
  double prev = 0.0;
  for (int k = 1; k <= 200000; ++k) {
    s = step_with_force(s, tau, {}, {}, params, dt);
    if (k % 500 == 0) {
      if (std::abs(s.nu_r.u - prev) < 1e-9) break;
      prev = s.nu_r.u;
    }
  }
  return s.nu_r.u;
}

}  // namespace

ThrustSpeedTable ThrustSpeedTable::calibrate(const VesselParams& params, int n_points, double dt) {
  if (n_points < 2) throw ValidationError("thrust table: need at least 2 points");
  if (params.thrusters.empty()) throw ConfigError("thrust table: vessel has no thrusters");
  ThrustSpeedTable t;
  for (int i = 0; i < n_points; ++i) {
    const double thrust = static_cast<double>(i) / static_cast<double>(n_points - 1);
    t.thrusts_.push_back(thrust);
    t.speeds_.push_back(steady_speed(params, thrust, dt));
  }
  for (std::size_t i = 1; i < t.speeds_.size(); ++i) {
    if (!(t.speeds_[i] > t.speeds_[i - 1])) {
      throw ConfigError("thrust table: steady speed is not increasing with thrust");
    }
  }
  return t;
}

double ThrustSpeedTable::speed_for(double thrust) const {
  if (thrusts_.empty()) throw Unconfigured("thrust table is empty");
  thrust = std::clamp(thrust, 0.0, 1.0);
  const auto it = std::upper_bound(thrusts_.begin(), thrusts_.end(), thrust);
  if (it == thrusts_.end()) return speeds_.back();
  const auto i = static_cast<std::size_t>(it - thrusts_.begin());
  const double w = (thrust - thrusts_[i - 1]) / (thrusts_[i] - thrusts_[i - 1]);
  return speeds_[i - 1] + w * (speeds_[i] - speeds_[i - 1]);
}

double ThrustSpeedTable::thrust_for(double speed) const {
  if (speeds_.empty()) throw Unconfigured("thrust table is empty");
  if (speed <= speeds_.front()) return thrusts_.front();
  if (speed >= speeds_.back()) return thrusts_.back();
  const auto it = std::lower_bound(speeds_.begin(), speeds_.end(), speed);
  const auto i = static_cast<std::size_t>(it - speeds_.begin());
  const double w = (speed - speeds_[i - 1]) / (speeds_[i] - speeds_[i - 1]);
  return thrusts_[i - 1] + w * (thrusts_[i] - thrusts_[i - 1]);
}

VelocityTracker::VelocityTracker(const VesselParams& params, ThrustSpeedTable table,
                                 VelocityTrackerGains gains)
    : table_(std::move(table)), gains_(gains) {
  if (params.thrusters.size() != 1 || !params.thrusters[0].steerable) {
    throw ConfigError(fmt::format("velocity tracker needs one steerable thruster, vessel '{}' has {}",
                                  params.name, params.thrusters.size()));
  }
  thruster_ = params.thrusters[0];
  // Yaw moment of a deflected thruster is dx * sin(theta) * F, so a positive
  // yaw moment needs an angle with the sign of dx.
  turn_sign_ = thruster_.dx < 0.0 ? -1.0 : 1.0;
}

ControlCommand VelocityTracker::command(double v_des, double omega_des, double yaw_rate) const {
  const double thrust = table_.thrust_for(v_des);
  const double angle = std::clamp(turn_sign_ * gains_.k_omega * (omega_des - yaw_rate),
                                  -gains_.max_angle, gains_.max_angle);
  return ControlCommand({{thrust, thruster_.norm_from_angle(angle)}});
}

std::vector<PidSample> run_pid_demo(const VesselParams& params, const PidDemoConfig& config,
                                    const Environment& env) {
  if (!(config.tick > 0.0) || !(config.dt > 0.0) || !(config.duration >= 0.0)) {
    throw ValidationError("pid demo: tick, dt must be > 0 and duration >= 0");
  }
  const int substeps = std::max(1, static_cast<int>(std::lround(config.tick / config.dt)));
  const double dt = config.tick / substeps;
  const auto ticks = static_cast<long>(std::floor(config.duration / config.tick + 1e-9));

  Pid pid(config.kp, config.ki, config.kd, 0.0, 1.0);
  SimState s = state_from_absolute({}, {}, env.current);
  std::vector<PidSample> log;
  for (long k = 0; k < ticks; ++k) {
    const double speed = ground_speed(s, env.current);
    const double thrust = pid.compute(config.target_speed, speed, config.tick);
    log.push_back({s.t, speed, thrust, s});
    const auto cmd = ControlCommand::uniform(params.thrusters.size(), thrust, 0.5);
    const Vec3 tau = thruster_allocation(cmd, params);
    for (int j = 0; j < substeps; ++j) s = step_with_force(s, tau, env.current, env.wind, params, dt);
  }
  return log;
}

}  // namespace asv
