#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "asv/dynamics.hpp"
#include "asv/vessel_io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace asv;

namespace {

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

VesselParams diagonal_vessel() {
  VesselParams p;
  p.name = "diag";
  p.mass = Vec3(100.0, 200.0, 300.0).asDiagonal();
  p.coriolis_mass = p.mass;
  p.damping_linear = Vec3(10.0, 20.0, 30.0).asDiagonal();
  p.thrusters.push_back({0.0, 0.0, 250.0, 0.0, 0.0, false});
  p.finalize();
  return p;
}

}  // namespace

TEST(Angles, WrapToHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(0.5 + 4.0 * kPi), 0.5, 1e-12);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(u(gen));
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
  }
}

TEST(Kinematics, RotationKnownValues) {
  EXPECT_LT(max_abs(rotation_matrix(0.0) - Mat3::Identity()), 1e-15);
  Mat3 quarter;
  quarter << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT(max_abs(rotation_matrix(kPi / 2) - quarter), 1e-15);
}

TEST(Kinematics, RotationOrthonormal) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double psi = u(gen);
    const Mat3 r = rotation_matrix(psi);
    EXPECT_LT(max_abs(r.transpose() * r - Mat3::Identity()), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    EXPECT_LT(max_abs(r - oracle::rotation(psi)), 1e-15);
  }
}

TEST(Kinematics, CurrentBody) {
  const auto a = current_body(0.0, CurrentSpec(1.0, 0.0));
  EXPECT_NEAR(a.u, 1.0, 1e-15);
  EXPECT_NEAR(a.v, 0.0, 1e-15);
  EXPECT_EQ(a.r, 0.0);

  const auto b = current_body(kPi / 2, CurrentSpec(1.0, 0.0));
  const Vec3 expect = oracle::rotation(kPi / 2).transpose() * Vec3(1.0, 0.0, 0.0);
  EXPECT_NEAR(b.u, expect[0], 1e-15);
  EXPECT_NEAR(b.v, -1.0, 1e-15);
  EXPECT_EQ(b.r, 0.0);

  const auto z = current_body(1.3, CurrentSpec(0.0, 2.1));
  EXPECT_EQ(z, BodyVelocity{});
}

TEST(Kinematics, CurrentBodyMatchesMatrixProduct) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ang(-kPi, kPi), spd(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double psi = ang(gen), beta = ang(gen), vc = spd(gen);
    const auto nu = current_body(psi, CurrentSpec(vc, beta));
    const Vec3 expect = oracle::rotation(psi).transpose() * Vec3(vc * std::cos(beta), vc * std::sin(beta), 0.0);
    EXPECT_NEAR(nu.u, expect[0], 1e-12);
    EXPECT_NEAR(nu.v, expect[1], 1e-12);
    EXPECT_EQ(nu.r, 0.0);
  }
}

TEST(Kinematics, RelativeVelocity) {
  EXPECT_EQ(relative_velocity({2, 0, 0}, {0.5, 0, 0}), (BodyVelocity{1.5, 0, 0}));
  EXPECT_EQ(relative_velocity({1, 2, 3}, {}), (BodyVelocity{1, 2, 3}));
  const auto r = relative_velocity({1, 1, 0.1}, {0.2, -0.3, 0});
  EXPECT_NEAR(r.u, 0.8, 1e-15);
  EXPECT_NEAR(r.v, 1.3, 1e-15);
  EXPECT_NEAR(r.r, 0.1, 1e-15);
}

TEST(Kinematics, AbsoluteFromRelativeRoundTrip) {
  const CurrentSpec c(0.4, 2.0);
  const SimState s = state_from_absolute({1, 2, 0.7}, {1.0, -0.2, 0.05}, c);
  const auto nu = absolute_velocity(s, c);
  EXPECT_NEAR(nu.u, 1.0, 1e-15);
  EXPECT_NEAR(nu.v, -0.2, 1e-15);
  EXPECT_NEAR(nu.r, 0.05, 1e-15);
}

TEST(CurrentSpec, RejectsNegativeSpeedAndWrapsHeading) {
  EXPECT_THROW(CurrentSpec(-0.1, 0.0), ValidationError);
  EXPECT_NEAR(CurrentSpec(1.0, 3.0 * kPi).heading(), kPi, 1e-12);
}

TEST(Allocation, WorkedExamples) {
  VesselParams p;
  p.thrusters.push_back({0.0, 0.0, 500.0, -kPi / 2, kPi / 2, true});
  p.finalize();
  const Vec3 straight = thruster_allocation(ControlCommand({{0.5, 0.5}}), p);
  EXPECT_EQ(straight, Vec3(250.0, 0.0, 0.0));

  const Thruster stern{-2.0, 0.0, 100.0, -kPi / 2, kPi / 2, true};
  const double force = 100.0, angle = kPi / 2;
  const Vec3 turned = allocate_forces(std::span(&stern, 1), std::span(&force, 1), std::span(&angle, 1));
  EXPECT_NEAR(turned[0], 0.0, 1e-12);
  EXPECT_NEAR(turned[1], 100.0, 1e-12);
  EXPECT_NEAR(turned[2], -200.0, 1e-12);

  EXPECT_EQ(thruster_allocation(ControlCommand({{0.0, 0.9}}), p), Vec3::Zero());
}

TEST(Allocation, MatchesMatrixOracleOnRandomLayouts) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> pos(-5.0, 5.0), unit(0.0, 1.0), f(10.0, 1000.0);
  for (int trial = 0; trial < 100; ++trial) {
    VesselParams p;
    const int n = 1 + trial % 4;
    std::vector<ControlCommand::Channel> ch;
    std::vector<double> tn, an;
    for (int i = 0; i < n; ++i) {
      Thruster t;
      t.dx = pos(gen);
      t.dy = pos(gen);
      t.max_force = f(gen);
      t.steerable = unit(gen) < 0.7;
      t.angle_min = t.steerable ? -unit(gen) * kPi / 2 : 0.0;
      t.angle_max = t.steerable ? unit(gen) * kPi / 2 : 0.0;
      p.thrusters.push_back(t);
      ch.push_back({unit(gen), unit(gen)});
      tn.push_back(ch.back().thrust);
      an.push_back(ch.back().angle);
    }
    p.finalize();
    const Vec3 tau = thruster_allocation(ControlCommand(ch), p);
    const Eigen::Vector3d expect = oracle::allocation(p.thrusters, tn, an);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(tau[k], expect[k], 1e-12);
  }
}

TEST(Allocation, LengthMismatchIsConfigError) {
  VesselParams p = diagonal_vessel();
  EXPECT_THROW(thruster_allocation(ControlCommand::neutral(2), p), ConfigError);
}

TEST(Allocation, AngleNormalization) {
  const Thruster t{0, 0, 1, -0.4, 0.8, true};
  EXPECT_EQ(t.angle_from_norm(0.5), 0.0);
  EXPECT_DOUBLE_EQ(t.angle_from_norm(0.0), -0.4);
  EXPECT_DOUBLE_EQ(t.angle_from_norm(1.0), 0.8);
  EXPECT_DOUBLE_EQ(t.angle_from_norm(0.75), 0.4);
  EXPECT_DOUBLE_EQ(t.angle_from_norm(0.25), -0.2);
  for (double a : {-0.4, -0.1, 0.0, 0.3, 0.8}) EXPECT_NEAR(t.angle_from_norm(t.norm_from_angle(a)), a, 1e-12);
  const Thruster fixed{0, 0, 1, 0.2, 0.2, false};
  EXPECT_EQ(fixed.angle_from_norm(0.9), 0.2);
}

TEST(ControlCommand, ClampsValues) {
  const ControlCommand c({{1.4, -0.2}});
  EXPECT_EQ(c.channels()[0].thrust, 1.0);
  EXPECT_EQ(c.channels()[0].angle, 0.0);
}

TEST(Coriolis, ZeroAndPowerNeutral) {
  const VesselParams p = testutil::ferry();
  EXPECT_EQ(coriolis(p, {}), Mat3::Zero());
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const BodyVelocity nu{u(gen), u(gen), u(gen)};
    const Vec3 v = nu.vec();
    EXPECT_NEAR(v.dot(coriolis(p, nu) * v), 0.0, 1e-10);
  }
}

TEST(Coriolis, ExampleVesselHandExpanded) {
  // nu_r = (1, 0.5, 0.1) on the example ferry:
  //   a = m11 u = 2400, b = m22 v + m23 r = 1350 + 10 = 1360.
  const Mat3 c = coriolis(testutil::ferry(), {1.0, 0.5, 0.1});
  Mat3 expect;
  expect << 0, 0, -1360, 0, 0, 2400, 1360, -2400, 0;
  EXPECT_LT(max_abs(c - expect), 1e-12);
}

TEST(Damping, LinearPlusQuadratic) {
  VesselParams p;
  p.damping_linear = Vec3(50.0, 20.0, 30.0).asDiagonal();
  p.damping_quadratic = Vec3(10.0, 5.0, 2.0);
  p.finalize();
  EXPECT_EQ(damping(p, {}), p.damping_linear);
  const Vec3 f = damping(p, {1.0, 0.0, 0.0}) * Vec3(1.0, 0.0, 0.0);
  EXPECT_NEAR(f[0], 60.0, 1e-12);

  const BodyVelocity nu{0.7, -0.3, 0.2};
  const BodyVelocity nu2{1.4, -0.6, 0.4};
  const Mat3 extra1 = damping(p, nu) - p.damping_linear;
  const Mat3 extra2 = damping(p, nu2) - p.damping_linear;
  EXPECT_LT(max_abs(extra2 - 2.0 * extra1), 1e-12);
}

TEST(Acceleration, EquilibriumAndDecoupledStep) {
  const VesselParams d = diagonal_vessel();
  EXPECT_EQ(acceleration(d, {}, Vec3::Zero(), Vec3::Zero()), BodyVelocity{});
  const auto a = acceleration(d, {}, Vec3(250.0, 0.0, 0.0), Vec3::Zero());
  EXPECT_NEAR(a.u, 2.5, 1e-15);
  EXPECT_EQ(a.v, 0.0);
  EXPECT_EQ(a.r, 0.0);
}

TEST(Acceleration, MatchesLinearSolveOracle) {
  const VesselParams p = testutil::ferry();
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(-2.0, 2.0), f(-800.0, 800.0);
  for (int i = 0; i < 500; ++i) {
    const BodyVelocity nu{u(gen), u(gen), 0.3 * u(gen)};
    const Vec3 tau(f(gen), f(gen), f(gen));
    const Vec3 wind(0.1 * f(gen), 0.1 * f(gen), 0.1 * f(gen));
    const auto a = acceleration(p, nu, tau, wind);
    const Eigen::Vector3d expect = oracle::acceleration(p, nu.vec(), tau, wind);
    EXPECT_NEAR(a.u, expect[0], 1e-10);
    EXPECT_NEAR(a.v, expect[1], 1e-10);
    EXPECT_NEAR(a.r, expect[2], 1e-10);
  }
}

TEST(Step, ZeroInputFixedPoint) {
  const VesselParams p = testutil::ferry();
  SimState s;
  for (int i = 0; i < 1000; ++i) s = step(s, ControlCommand::neutral(1), {}, {}, p, kDefaultDt);
  EXPECT_LT(std::abs(s.pose.x) + std::abs(s.pose.y) + std::abs(s.pose.psi), 1e-12);
  EXPECT_LT(std::abs(s.nu_r.u) + std::abs(s.nu_r.v) + std::abs(s.nu_r.r), 1e-12);
  EXPECT_NEAR(s.t, 20.0, 1e-9);
}

TEST(Step, KineticEnergyNonIncreasingWithoutInput) {
  const VesselParams p = testutil::ferry();
  SimState s;
  s.nu_r = {1.5, -0.4, 0.2};
  double e = kinetic_energy(p, s.nu_r);
  for (int i = 0; i < 2000; ++i) {
    s = step(s, ControlCommand::neutral(1), {}, {}, p, kDefaultDt);
    const double e2 = kinetic_energy(p, s.nu_r);
    ASSERT_LT(e2, e) << "step " << i;
    e = e2;
  }
}

TEST(Step, StraightThrustStaysOnAxis) {
  const VesselParams p = testutil::ferry();
  SimState s;
  const auto cmd = ControlCommand::uniform(1, 0.5, 0.5);
  for (int i = 0; i < 3000; ++i) s = step(s, cmd, {}, {}, p, kDefaultDt);
  EXPECT_LT(std::abs(s.pose.y), 1e-6);
  EXPECT_LT(std::abs(s.pose.psi), 1e-6);
  EXPECT_GT(s.pose.x, 10.0);
}

TEST(Step, DeterministicBitwise) {
  const VesselParams p = testutil::ferry();
  SimState a, b;
  a.nu_r = b.nu_r = {0.3, 0.1, -0.02};
  const auto cmd = ControlCommand::uniform(1, 0.8, 0.62);
  const CurrentSpec c(0.4, 2.3);
  for (int i = 0; i < 500; ++i) {
    a = step(a, cmd, c, {}, p, kDefaultDt);
    b = step(b, cmd, c, {}, p, kDefaultDt);
  }
  EXPECT_EQ(a.pose, b.pose);
  EXPECT_EQ(a.nu_r, b.nu_r);
}

TEST(Step, PsiStaysWrapped) {
  const VesselParams p = testutil::ferry();
  SimState s;
  s.pose.psi = 3.1;
  const auto cmd = ControlCommand::uniform(1, 1.0, 0.0);
  for (int i = 0; i < 5000; ++i) {
    s = step(s, cmd, {}, {}, p, kDefaultDt);
    ASSERT_GT(s.pose.psi, -kPi);
    ASSERT_LE(s.pose.psi, kPi);
  }
}

TEST(Step, RejectsBadDtAndReportsDivergence) {
  const VesselParams p = testutil::ferry();
  EXPECT_THROW(step({}, ControlCommand::neutral(1), {}, {}, p, 0.0), ValidationError);
  SimState s;
  s.nu_r = {1e200, 0.0, 0.0};
  try {
    for (int i = 0; i < 10; ++i) s = step(s, ControlCommand::neutral(1), {}, {}, p, 1.0);
    FAIL() << "expected divergence";
  } catch (const IntegrationDiverged& e) {
    EXPECT_EQ(e.code(), "integration-diverged");
  }
}

TEST(Step, WindPushesSideways) {
  const VesselParams p = testutil::ferry();
  SimState s;
  WindForce w;
  w.tau = Vec3(0.0, 200.0, 0.0);
  for (int i = 0; i < 500; ++i) s = step(s, ControlCommand::neutral(1), {}, w, p, kDefaultDt);
  EXPECT_GT(s.nu_r.v, 0.0);
}

TEST(Step, DriftsWithCurrentFromRest) {
  const VesselParams p = testutil::ferry();
  const CurrentSpec c(0.5, kPi / 2);
  SimState s = state_from_absolute({}, {}, c);
  for (int i = 0; i < 3000; ++i) s = step(s, ControlCommand::neutral(1), c, {}, p, kDefaultDt);
  // A passive hull is carried along by the current.
  EXPECT_GT(s.pose.y, 10.0);
  EXPECT_NEAR(absolute_velocity(s, c).v, 0.5, 0.05);
}

TEST(VesselModel, ExampleLoadsWithSpdMass) {
  const VesselParams p = testutil::ferry();
  EXPECT_EQ(p.name, "example-ferry");
  EXPECT_TRUE(p.finalized());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(p.mass);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  EXPECT_LT(max_abs(p.mass_inverse() * p.mass - Mat3::Identity()), 1e-12);
  ASSERT_EQ(p.thrusters.size(), 1u);
  EXPECT_DOUBLE_EQ(p.thrusters[0].max_force, 500.0);
}

TEST(VesselModel, RejectsAsymmetricMass) {
  const std::string doc = R"(
name: bad
length: 1
mass: [[10, 1, 0], [2, 10, 0], [0, 0, 10]]
damping_linear: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
)";
  EXPECT_THROW(load_model(doc), AsymmetricMassError);
}

TEST(VesselModel, RejectsNonSpdMass) {
  const std::string doc = R"(
name: bad
length: 1
mass: [[1, 2, 0], [2, 1, 0], [0, 0, 1]]
)";
  EXPECT_THROW(load_model(doc), NonSpdMassError);
}

TEST(VesselModel, RejectsBadThrusterBounds) {
  const std::string doc = R"(
name: bad
length: 1
mass: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
thrusters:
  - {dx: 0, dy: 0, max_force: 10, steerable: true, angle_min: 0.5, angle_max: -0.5}
)";
  EXPECT_THROW(load_model(doc), ThrusterBoundsError);
}

TEST(VesselModel, ZeroThrustersIsDriftOnly) {
  const std::string doc = R"(
name: drifter
length: 1
mass: [[100, 0, 0], [0, 100, 0], [0, 0, 100]]
damping_linear: [[10, 0, 0], [0, 10, 0], [0, 0, 10]]
thrusters: []
)";
  const VesselParams p = load_model(doc);
  EXPECT_TRUE(p.thrusters.empty());
  EXPECT_EQ(thruster_allocation(ControlCommand{}, p), Vec3::Zero());
}

TEST(VesselModel, ParseErrorsNameTheLine) {
  try {
    load_model("name: x\nlength: 1\nmass: [[1, 0], [0, 1]]\n", "doc.yaml");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("doc.yaml:3"), std::string::npos) << e.what();
  }
}

TEST(VesselModel, DumpRoundTrip) {
  const VesselParams p = testutil::ferry();
  const VesselParams q = load_model(dump_model(p));
  EXPECT_EQ(p.mass, q.mass);
  EXPECT_EQ(p.damping_quadratic, q.damping_quadratic);
  EXPECT_EQ(p.thrusters.size(), q.thrusters.size());
}

TEST(VesselModel, UnfilledTemplatesRefuseToLoad) {
  for (const char* name : {"template-milliampere.yaml", "template-qiuxin-no5.yaml",
                           "template-cybership-ii.yaml", "template-mariner.yaml"}) {
    EXPECT_THROW(load_model_file(testutil::data_dir() / "vessels" / name), ValidationError) << name;
  }
}
