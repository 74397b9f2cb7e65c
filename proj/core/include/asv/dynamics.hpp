// 3-DOF (surge, sway, yaw) maneuvering model with irrotational currents.
//
// The integrated state is the earth-frame pose eta = [x, y, psi] together with
// the current-relative body velocity nu_r = nu - nu_c. Under a constant,
// irrotational current the relative form
//
//     M nu_r' + C(nu_r) nu_r + D(nu_r) nu_r = tau + tau_wind
//     eta'    = R(psi) (nu_r + nu_c(psi))
//
// holds with a single mass, Coriolis and damping model.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "asv/common.hpp"

namespace asv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // wrapped to (-pi, pi]

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Body-frame velocity [u, v, r]; used for nu, nu_r and nu_c alike.
struct BodyVelocity {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;

  Vec3 vec() const { return {u, v, r}; }
  static BodyVelocity from(const Vec3& x) { return {x[0], x[1], x[2]}; }
  friend bool operator==(const BodyVelocity&, const BodyVelocity&) = default;
};

/// Uniform, irrotational current: speed V_c [m/s] towards earth-frame heading beta_c.
class CurrentSpec {
 public:
  CurrentSpec() = default;
  CurrentSpec(double speed, double heading);

  double speed() const { return speed_; }
  double heading() const { return heading_; }

 private:
  double speed_ = 0.0;
  double heading_ = 0.0;
};

/// External wind load, applied directly as a body-frame generalized force.
struct WindForce {
  Vec3 tau = Vec3::Zero();  // [N, N, N*m]
};

struct Thruster {
  double dx = 0.0;  // offset from CoG [m], positive forward
  double dy = 0.0;  // offset from CoG [m], positive starboard/left per body frame
  double max_force = 1.0;
  double angle_min = 0.0;
  double angle_max = 0.0;
  bool steerable = false;

  /// Maps a normalized angle command to radians: 0.5 -> 0, 0 -> angle_min,
  /// 1 -> angle_max, affine on each half. Fixed thrusters always return angle_min.
  double angle_from_norm(double angle_norm) const;
  /// Inverse of angle_from_norm for steerable thrusters; clamps to [0, 1].
  double norm_from_angle(double angle) const;
};

/// One normalized (thrust, angle) pair per thruster, clamped to [0, 1].
class ControlCommand {
 public:
  struct Channel {
    double thrust = 0.0;
    double angle = 0.5;
  };

  ControlCommand() = default;
  explicit ControlCommand(std::vector<Channel> channels);
  /// Zero thrust, straight thrusters.
  static ControlCommand neutral(std::size_t n_thrusters);
  /// Same (thrust, angle) on every thruster.
  static ControlCommand uniform(std::size_t n_thrusters, double thrust, double angle);

  std::span<const Channel> channels() const { return channels_; }
  std::size_t size() const { return channels_.size(); }

 private:
  std::vector<Channel> channels_;
};

struct VesselParams {
  std::string name;
  double length = 1.0;           // overall length [m], sets the default footprint
  Mat3 mass = Mat3::Identity();  // M = M_RB + M_A
  Mat3 coriolis_mass = Mat3::Identity();  // matrix C(.) is built from; defaults to M
  Mat3 damping_linear = Mat3::Zero();
  Vec3 damping_quadratic = Vec3::Zero();  // coefficients of |u|u, |v|v, |r|r
  std::vector<Thruster> thrusters;

  /// Validates the model and caches the mass factorization. Throws
  /// AsymmetricMassError / NonSpdMassError / ThrusterBoundsError.
  void finalize();
  bool finalized() const { return finalized_; }
  const Mat3& mass_inverse() const { return mass_inv_; }
  double footprint_radius() const { return 0.5 * length; }

 private:
  Mat3 mass_inv_ = Mat3::Identity();
  bool finalized_ = false;
};

struct SimState {
  Pose pose;
  BodyVelocity nu_r;
  double t = 0.0;
};

struct Environment {
  CurrentSpec current;
  WindForce wind;
};

// --- kinematics ---------------------------------------------------------------

Mat3 rotation_matrix(double psi);
BodyVelocity current_body(double psi, const CurrentSpec& current);
BodyVelocity relative_velocity(const BodyVelocity& nu, const BodyVelocity& nu_c);
/// nu = nu_r + nu_c(psi)
BodyVelocity absolute_velocity(const SimState& s, const CurrentSpec& current);
/// Builds a state from an earth-relative body velocity (e.g. at rest over ground).
SimState state_from_absolute(const Pose& pose, const BodyVelocity& nu, const CurrentSpec& current,
                             double t = 0.0);

// --- kinetics -----------------------------------------------------------------

/// Generalized force from physical per-thruster forces and angles.
Vec3 allocate_forces(std::span<const Thruster> thrusters, std::span<const double> forces,
                     std::span<const double> angles);
/// Normalized command -> generalized force. Throws ConfigError on length mismatch.
Vec3 thruster_allocation(const ControlCommand& cmd, const VesselParams& params);

Mat3 coriolis(const VesselParams& params, const BodyVelocity& nu_r);
Mat3 damping(const VesselParams& params, const BodyVelocity& nu_r);
BodyVelocity acceleration(const VesselParams& params, const BodyVelocity& nu_r, const Vec3& tau,
                          const Vec3& tau_wind);

/// Kinetic energy 0.5 nu_r^T M nu_r.
double kinetic_energy(const VesselParams& params, const BodyVelocity& nu_r);

/// One classical RK4 step of the coupled (eta, nu_r) system.
/// Throws IntegrationDiverged if any state component becomes non-finite.
SimState step(const SimState& state, const ControlCommand& cmd, const CurrentSpec& current,
              const WindForce& wind, const VesselParams& params, double dt);

/// step() with a precomputed generalized thrust (tau is constant over the step).
SimState step_with_force(const SimState& state, const Vec3& tau, const CurrentSpec& current,
                         const WindForce& wind, const VesselParams& params, double dt);

inline constexpr double kDefaultDt = 0.02;

}  // namespace asv
