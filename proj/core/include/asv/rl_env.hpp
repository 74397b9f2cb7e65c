// Episodic goal-reaching environment with static obstacles. One step applies
// a (thrust, angle) action for one second of simulated time.
//
//   obs    = [d_goal, psi, nu(3), nu_dot(3), a_prev(2), d_obstacles(n_beams)]
//   reward = G1 * R_distance + G2 * R_direction + G3 * R_heading + R_end
//
//   R_distance  = -d_goal(t)
//   R_direction = d_goal(t-1) - d_goal(t)
//   R_heading   = -|wrap(bearing_to_goal - psi)|
//   R_end       = +500 on goal, -500 on collision or timeout, 0 otherwise
#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "asv/dynamics.hpp"
#include "asv/world.hpp"

namespace asv {

struct ActionSpec {
  static constexpr double kThrustMin = 0.0;
  static constexpr double kThrustMax = 1.0;
  static constexpr double kAngleMin = 0.4;
  static constexpr double kAngleMax = 0.6;

  double thrust = 0.0;
  double angle = 0.5;

  /// Clamped copy; `clamped` reports whether anything changed.
  ActionSpec clamped(bool* changed = nullptr) const;
};

struct RewardConfig {
  double g1 = 0.01;
  double g2 = 1.0;
  double g3 = 0.1;
  double terminal_bonus = 500.0;
  double terminal_penalty = -500.0;
  double goal_radius = 5.0;
  int max_steps = 300;

  void validate() const;
};

struct EnvConfig {
  RewardConfig reward;
  int n_beams = 36;
  double sensor_range = 50.0;
  double step_period = 1.0;
  double dt = kDefaultDt;
  /// Collision disc radius; 0 uses half the vessel length.
  double footprint_radius = 0.0;

  void validate() const;
};

struct Observation {
  double d_goal = 0.0;
  double theta = 0.0;
  BodyVelocity nu;
  BodyVelocity nu_dot;
  ActionSpec a_prev;
  std::vector<double> d_obstacles;

  std::size_t size() const { return 10 + d_obstacles.size(); }
  std::vector<double> flatten() const;
};

enum class Outcome { none, goal, collision, timeout };
const char* to_string(Outcome o);

struct RewardTerms {
  double distance = 0.0;
  double direction = 0.0;
  double heading = 0.0;
  double end = 0.0;
  double total = 0.0;
};

RewardTerms compute_reward(const Pose& prev, const Pose& next, Vec2 goal, Outcome outcome,
                           const RewardConfig& config);

struct StepInfo {
  Outcome outcome = Outcome::none;
  RewardTerms terms;
  bool action_clamped = false;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

class RlEnvironment {
 public:
  RlEnvironment() = default;
  RlEnvironment(ObstacleWorld world, VesselParams params, EnvConfig config = {});

  /// Back to the fixed spawn at rest over ground. Throws Unconfigured.
  Observation reset(std::uint64_t seed);
  /// Throws EpisodeFinished after termination or before the first reset.
  StepResult step(const ActionSpec& action);
  /// Ends the running episode as a failure (collision-equivalent).
  StepResult abort_episode();

  bool configured() const { return configured_; }
  bool done() const { return done_; }
  /// Reset has been called and the episode has not terminated.
  bool active() const { return active_ && !done_; }
  int steps() const { return steps_; }
  std::uint64_t seed() const { return seed_; }
  const SimState& state() const { return state_; }
  const ObstacleWorld& world() const { return world_; }
  const VesselParams& params() const { return params_; }
  const EnvConfig& config() const { return config_; }
  std::size_t observation_size() const { return 10 + static_cast<std::size_t>(config_.n_beams); }

 private:
  Observation observe(const ActionSpec& applied) const;
  void require_active() const;

  ObstacleWorld world_;
  VesselParams params_;
  EnvConfig config_;
  double footprint_ = 0.0;
  bool configured_ = false;
  bool active_ = false;
  bool done_ = false;
  int steps_ = 0;
  std::uint64_t seed_ = 0;
  SimState state_;
  ActionSpec a_prev_;
};

using Policy = std::function<ActionSpec(const Observation&, const RlEnvironment&)>;

/// Uniform actions over the action box, from its own seeded generator.
Policy random_policy(std::uint64_t seed);

struct ScriptedPolicyGains {
  double cruise_thrust = 0.6;
  double k_heading = 0.15;  // angle_norm per rad of heading error
  double k_yaw_rate = 0.4;  // angle_norm per rad/s of yaw rate
};

/// Fixed cruise thrust, steering proportional to the bearing error to the goal.
Policy scripted_policy(ScriptedPolicyGains gains = {});

struct EpisodeStats {
  int episode_index = 0;
  int steps = 0;
  Outcome outcome = Outcome::none;
  double cumulative_reward = 0.0;
  double success_rate_running = 0.0;
};

struct StepLogRow {
  int episode = 0;
  int step = 0;
  Observation obs;
  ActionSpec action;
  RewardTerms terms;
  Outcome outcome = Outcome::none;
};

/// Runs n episodes back to back; episode i resets with seed base_seed + i. A
/// non-finite action aborts that episode as a collision-equivalent failure.
std::vector<EpisodeStats> run_policy(RlEnvironment& env, const Policy& policy, int n_episodes,
                                     std::uint64_t base_seed = 0,
                                     std::vector<StepLogRow>* log = nullptr);

void write_episode_log_csv(std::ostream& out, const std::vector<StepLogRow>& rows);
void write_episode_summary_csv(std::ostream& out, const std::vector<EpisodeStats>& stats);

}  // namespace asv
