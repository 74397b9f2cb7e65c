// Low-level controllers that turn setpoints into normalized thruster commands.
#pragma once

#include <limits>
#include <vector>

#include "asv/dynamics.hpp"

namespace asv {

/// Textbook PID on a scalar error with output clamping. The first update has
/// no derivative term.
class Pid {
 public:
  Pid(double kp, double ki, double kd, double out_min = -std::numeric_limits<double>::infinity(),
      double out_max = std::numeric_limits<double>::infinity());

  double compute(double setpoint, double measured, double dt);
  void reset();

 private:
  double kp_, ki_, kd_, out_min_, out_max_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  bool has_prev_ = false;
};

/// Speed over ground from the earth-frame velocity (what a GNSS receiver reports).
double ground_speed(const SimState& s, const CurrentSpec& current);

/// Static map from normalized thrust to the steady straight-line surge speed
/// in still water, generated by simulating the vessel to steady state.
class ThrustSpeedTable {
 public:
  ThrustSpeedTable() = default;
  static ThrustSpeedTable calibrate(const VesselParams& params, int n_points = 21,
                                    double dt = kDefaultDt);

  double speed_for(double thrust) const;
  /// Smallest thrust whose steady speed reaches `speed`, clamped to [0, 1].
  double thrust_for(double speed) const;
  double max_speed() const { return speeds_.empty() ? 0.0 : speeds_.back(); }
  const std::vector<double>& thrusts() const { return thrusts_; }
  const std::vector<double>& speeds() const { return speeds_; }

 private:
  std::vector<double> thrusts_;
  std::vector<double> speeds_;
};

/// Maps a (v, omega) velocity request to a single-thruster command: thrust
/// from the steady-speed table, angle from proportional yaw-rate control.
struct VelocityTrackerGains {
  double k_omega = 6.0;      // rad of thruster angle per rad/s of yaw-rate error
  double max_angle = 0.6;    // saturation of the commanded thruster angle [rad]
};

class VelocityTracker {
 public:
  VelocityTracker(const VesselParams& params, ThrustSpeedTable table,
                  VelocityTrackerGains gains = {});

  ControlCommand command(double v_des, double omega_des, double yaw_rate) const;
  const ThrustSpeedTable& table() const { return table_; }

 private:
  Thruster thruster_;
  ThrustSpeedTable table_;
  VelocityTrackerGains gains_;
  double turn_sign_;
};

struct PidDemoConfig {
  double kp = 1.5;
  double ki = 1.0;
  double kd = 0.2;
  double target_speed = 0.51;  // 1 knot
  double tick = 0.1;           // control period [s]
  double duration = 60.0;
  double dt = kDefaultDt;
};

struct PidSample {
  double t = 0.0;
  double speed = 0.0;
  double thrust = 0.0;
  SimState state;
};

/// Surge speed hold with a straight thruster, one sample per control tick.
std::vector<PidSample> run_pid_demo(const VesselParams& params, const PidDemoConfig& config,
                                    const Environment& env = {});

}  // namespace asv
