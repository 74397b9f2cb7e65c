#include "asv/dynamics.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <random>

#include <fmt/format.h>

namespace asv {

CurrentSpec::CurrentSpec(double speed, double heading)
    : speed_(speed), heading_(wrap_angle(heading)) {
  if (!(speed >= 0.0) || !std::isfinite(speed) || !std::isfinite(heading)) {
    throw ValidationError(fmt::format("current speed must be finite and >= 0 (got {})", speed));
  }
}

double Thruster::angle_from_norm(double a) const {
  if (!steerable) return angle_min;
  a = std::clamp(a, 0.0, 1.0);
  if (a >= 0.5) return (a - 0.5) * 2.0 * angle_max;
  return (0.5 - a) * 2.0 * angle_min;
}

double Thruster::norm_from_angle(double angle) const {
  if (!steerable) return 0.5;
  if (angle >= 0.0) {
    if (angle_max <= 0.0) return 0.5;
    return std::clamp(0.5 + 0.5 * angle / angle_max, 0.0, 1.0);
  }
  if (angle_min >= 0.0) return 0.5;
  return std::clamp(0.5 - 0.5 * angle / angle_min, 0.0, 1.0);
}

ControlCommand::ControlCommand(std::vector<Channel> channels) : channels_(std::move(channels)) {
  for (auto& c : channels_) {
    // NaN survives std::clamp, so reject it here rather than propagating.
    if (!std::isfinite(c.thrust) || !std::isfinite(c.angle)) {
      throw ValidationError("control command contains a non-finite value");
    }
    c.thrust = std::clamp(c.thrust, 0.0, 1.0);
    c.angle = std::clamp(c.angle, 0.0, 1.0);
  }
}

ControlCommand ControlCommand::neutral(std::size_t n) { return uniform(n, 0.0, 0.5); }

ControlCommand ControlCommand::uniform(std::size_t n, double thrust, double angle) {
  return ControlCommand(std::vector<Channel>(n, Channel{thrust, angle}));
}

void VesselParams::finalize() {
  if (!mass.allFinite() || !coriolis_mass.allFinite() || !damping_linear.allFinite() ||
      !damping_quadratic.allFinite()) {
    throw ValidationError(fmt::format("vessel '{}': non-finite model coefficient", name));
  }
  if (!(length > 0.0)) {
    throw ValidationError(fmt::format("vessel '{}': length must be > 0", name));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (mass(i, j) != mass(j, i)) {
        throw AsymmetricMassError(fmt::format("vessel '{}': mass matrix not symmetric: M{}{}={} vs M{}{}={}",
                                              name, i + 1, j + 1, mass(i, j), j + 1, i + 1,
                                              mass(j, i)));
      }
    }
  }
  Eigen::LLT<Mat3> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw NonSpdMassError(fmt::format("vessel '{}': mass matrix is not positive definite", name));
  }
  mass_inv_ = llt.solve(Mat3::Identity());

  for (std::size_t i = 0; i < thrusters.size(); ++i) {
    const auto& t = thrusters[i];
    if (!(t.max_force > 0.0) || !std::isfinite(t.max_force)) {
      throw ThrusterBoundsError(fmt::format("vessel '{}': thruster {} max_force must be > 0", name, i));
    }
    if (!(t.angle_min <= t.angle_max)) {
      throw ThrusterBoundsError(fmt::format("vessel '{}': thruster {} angle_min > angle_max", name, i));
    }
    if (!t.steerable && t.angle_min != t.angle_max) {
      throw ThrusterBoundsError(
          fmt::format("vessel '{}': fixed thruster {} needs angle_min == angle_max", name, i));
    }
    if (t.steerable && (t.angle_min > 0.0 || t.angle_max < 0.0)) {
      throw ThrusterBoundsError(fmt::format(
          "vessel '{}': steerable thruster {} bounds must bracket 0 (0.5 maps to 0 rad)", name, i));
    }
    if (t.angle_min < -kPi || t.angle_max > kPi) {
      throw ThrusterBoundsError(fmt::format("vessel '{}': thruster {} bounds exceed [-pi, pi]", name, i));
    }
  }

  // Advisory dissipativity check: nu^T D(nu) nu >= 0 on sampled velocities.
  finalized_ = true;
  std::mt19937_64 gen(0x5eed);
  for (int k = 0; k < 64; ++k) {
    BodyVelocity nu{(static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5) * 4.0,
                    (static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5) * 4.0,
                    (static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5) * 1.0};
    const Vec3 x = nu.vec();
    if (x.dot(damping(*this, nu) * x) < 0.0) {
      spdlog::warn("vessel '{}': damping is not dissipative at nu=({}, {}, {})", name, nu.u, nu.v, nu.r);
      break;
    }
  }
}

Mat3 rotation_matrix(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat3 R;
  // clang-format off
  R << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  // clang-format on
  return R;
}

BodyVelocity current_body(double psi, const CurrentSpec& current) {
  const Vec3 eta_dot_c{current.speed() * std::cos(current.heading()),
                       current.speed() * std::sin(current.heading()), 0.0};
  Vec3 nu_c = rotation_matrix(psi).transpose() * eta_dot_c;
  nu_c[2] = 0.0;  // irrotational
  return BodyVelocity::from(nu_c);
}

BodyVelocity relative_velocity(const BodyVelocity& nu, const BodyVelocity& nu_c) {
  return {nu.u - nu_c.u, nu.v - nu_c.v, nu.r - nu_c.r};
}

BodyVelocity absolute_velocity(const SimState& s, const CurrentSpec& current) {
  const BodyVelocity nu_c = current_body(s.pose.psi, current);
  return {s.nu_r.u + nu_c.u, s.nu_r.v + nu_c.v, s.nu_r.r + nu_c.r};
}

SimState state_from_absolute(const Pose& pose, const BodyVelocity& nu, const CurrentSpec& current,
                             double t) {
  SimState s;
  s.pose = {pose.x, pose.y, wrap_angle(pose.psi)};
  s.nu_r = relative_velocity(nu, current_body(s.pose.psi, current));
  s.t = t;
  return s;
}

Vec3 allocate_forces(std::span<const Thruster> thrusters, std::span<const double> forces,
                     std::span<const double> angles) {
  if (forces.size() != thrusters.size() || angles.size() != thrusters.size()) {
    throw ConfigError(fmt::format("allocation expects {} thrusters, got {} forces / {} angles",
                                  thrusters.size(), forces.size(), angles.size()));
  }
  Vec3 tau = Vec3::Zero();
  for (std::size_t i = 0; i < thrusters.size(); ++i) {
    const double c = std::cos(angles[i]);
    const double s = std::sin(angles[i]);
    tau[0] += c * forces[i];
    tau[1] += s * forces[i];
    tau[2] += (thrusters[i].dx * s - thrusters[i].dy * c) * forces[i];
  }
  return tau;
}

Vec3 thruster_allocation(const ControlCommand& cmd, const VesselParams& params) {
  const auto& th = params.thrusters;
  if (cmd.size() != th.size()) {
    throw ConfigError(fmt::format("command has {} channels but vessel '{}' has {} thrusters",
                                  cmd.size(), params.name, th.size()));
  }
  std::vector<double> forces(th.size());
  std::vector<double> angles(th.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    forces[i] = cmd.channels()[i].thrust * th[i].max_force;
    angles[i] = th[i].angle_from_norm(cmd.channels()[i].angle);
  }
  return allocate_forces(th, forces, angles);
}

Mat3 coriolis(const VesselParams& params, const BodyVelocity& nu_r) {
  // Surge/sway-independent 3-DOF form: with a = (M nu)_1, b = (M nu)_2,
  // C = [[0, 0, -b], [0, 0, a], [b, -a, 0]], skew-symmetric for any nu.
  const Vec3 m_nu = params.coriolis_mass * nu_r.vec();
  const double a = m_nu[0];
  const double b = m_nu[1];
  Mat3 C;
  // clang-format off
  C << 0.0, 0.0, -b,
       0.0, 0.0,  a,
         b,  -a, 0.0;
  // clang-format on
  return C;
}

Mat3 damping(const VesselParams& params, const BodyVelocity& nu_r) {
  Mat3 D = params.damping_linear;
  D(0, 0) += params.damping_quadratic[0] * std::abs(nu_r.u);
  D(1, 1) += params.damping_quadratic[1] * std::abs(nu_r.v);
  D(2, 2) += params.damping_quadratic[2] * std::abs(nu_r.r);
  return D;
}

BodyVelocity acceleration(const VesselParams& params, const BodyVelocity& nu_r, const Vec3& tau,
                          const Vec3& tau_wind) {
  const Vec3 x = nu_r.vec();
  const Vec3 rhs = tau + tau_wind - coriolis(params, nu_r) * x - damping(params, nu_r) * x;
  return BodyVelocity::from(params.mass_inverse() * rhs);
}

double kinetic_energy(const VesselParams& params, const BodyVelocity& nu_r) {
  const Vec3 x = nu_r.vec();
  return 0.5 * x.dot(params.mass * x);
}

namespace {

using StateVec = Eigen::Matrix<double, 6, 1>;

StateVec derivative(const StateVec& s, const Vec3& tau, const CurrentSpec& current,
                    const WindForce& wind, const VesselParams& params) {
  const double psi = s[2];
  const BodyVelocity nu_r{s[3], s[4], s[5]};
  const BodyVelocity nu_c = current_body(psi, current);
  const Vec3 nu = nu_r.vec() + nu_c.vec();
  StateVec d;
  d.head<3>() = rotation_matrix(psi) * nu;
  d.tail<3>() = acceleration(params, nu_r, tau, wind.tau).vec();
  return d;
}

constexpr std::array<const char*, 6> kComponentNames{"x", "y", "psi", "u_r", "v_r", "r_r"};

}  // namespace

SimState step_with_force(const SimState& state, const Vec3& tau, const CurrentSpec& current,
                         const WindForce& wind, const VesselParams& params, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError(fmt::format("dt must be > 0 (got {})", dt));
  }
  StateVec s;
  s << state.pose.x, state.pose.y, state.pose.psi, state.nu_r.u, state.nu_r.v, state.nu_r.r;

  const StateVec k1 = derivative(s, tau, current, wind, params);
  const StateVec k2 = derivative(s + 0.5 * dt * k1, tau, current, wind, params);
  const StateVec k3 = derivative(s + 0.5 * dt * k2, tau, current, wind, params);
  const StateVec k4 = derivative(s + dt * k3, tau, current, wind, params);
  const StateVec next = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(next[i])) {
      throw IntegrationDiverged(kComponentNames[static_cast<std::size_t>(i)],
                                fmt::format("integration diverged at t={}: component '{}' is {}",
                                            state.t, kComponentNames[static_cast<std::size_t>(i)],
                                            next[i]));
    }
  }

  SimState out;
  out.pose = {next[0], next[1], wrap_angle(next[2])};
  out.nu_r = {next[3], next[4], next[5]};
  out.t = state.t + dt;
  return out;
}

SimState step(const SimState& state, const ControlCommand& cmd, const CurrentSpec& current,
              const WindForce& wind, const VesselParams& params, double dt) {
  return step_with_force(state, thruster_allocation(cmd, params), current, wind, params, dt);
}

}  // namespace asv
