#include "asv/rl_env.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

namespace asv {

ActionSpec ActionSpec::clamped(bool* changed) const {
  ActionSpec out{std::clamp(thrust, kThrustMin, kThrustMax), std::clamp(angle, kAngleMin, kAngleMax)};
  if (changed) *changed = out.thrust != thrust || out.angle != angle;
  return out;
}

void RewardConfig::validate() const {
  if (!(goal_radius > 0.0)) throw ValidationError("reward: goal_radius must be > 0");
  if (max_steps < 1) throw ValidationError("reward: max_steps must be >= 1");
  for (double g : {g1, g2, g3, terminal_bonus, terminal_penalty}) {
    if (!std::isfinite(g)) throw ValidationError("reward: weights must be finite");
  }
}

void EnvConfig::validate() const {
  reward.validate();
  if (n_beams < 1) throw ValidationError("env: n_beams must be >= 1");
  if (!(sensor_range > 0.0)) throw ValidationError("env: sensor_range must be > 0");
  if (!(dt > 0.0) || !(step_period >= dt)) throw ValidationError("env: need step_period >= dt > 0");
  if (!(footprint_radius >= 0.0)) throw ValidationError("env: footprint_radius must be >= 0");
}

std::vector<double> Observation::flatten() const {
  std::vector<double> v{d_goal, theta, nu.u, nu.v, nu.r, nu_dot.u, nu_dot.v, nu_dot.r,
                        a_prev.thrust, a_prev.angle};
  v.insert(v.end(), d_obstacles.begin(), d_obstacles.end());
  return v;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::none: return "none";
    case Outcome::goal: return "goal";
    case Outcome::collision: return "collision";
    case Outcome::timeout: return "timeout";
  }
  return "unknown";
}

namespace {

double heading_error(const Pose& p, Vec2 goal) {
  const Vec2 d = goal - p.position();
  return angle_diff(std::atan2(d.y, d.x), p.psi);
}

}  // namespace

RewardTerms compute_reward(const Pose& prev, const Pose& next, Vec2 goal, Outcome outcome,
                           const RewardConfig& config) {
  const double d_prev = norm(goal - prev.position());
  const double d_next = norm(goal - next.position());
  RewardTerms r;
  r.distance = -d_next;
  r.direction = d_prev - d_next;
  r.heading = -std::abs(heading_error(next, goal));
  switch (outcome) {
    case Outcome::goal: r.end = config.terminal_bonus; break;
    case Outcome::collision:
    case Outcome::timeout: r.end = config.terminal_penalty; break;
    case Outcome::none: r.end = 0.0; break;
  }
  r.total = config.g1 * r.distance + config.g2 * r.direction + config.g3 * r.heading + r.end;
  return r;
}

RlEnvironment::RlEnvironment(ObstacleWorld world, VesselParams params, EnvConfig config)
    : world_(std::move(world)), params_(std::move(params)), config_(config) {
  config_.validate();
  if (!params_.finalized()) params_.finalize();
  if (params_.thrusters.size() != 1) {
    throw ConfigError(fmt::format("env: the action drives one thruster, vessel '{}' has {}",
                                  params_.name, params_.thrusters.size()));
  }
  footprint_ = config_.footprint_radius > 0.0 ? config_.footprint_radius : params_.footprint_radius();
  configured_ = true;
}

Observation RlEnvironment::observe(const ActionSpec& applied) const {
  Observation o;
  o.d_goal = norm(world_.goal() - state_.pose.position());
  o.theta = state_.pose.psi;
  o.nu = absolute_velocity(state_, world_.current());
  const auto cmd = ControlCommand({{applied.thrust, applied.angle}});
  o.nu_dot = acceleration(params_, state_.nu_r, thruster_allocation(cmd, params_), world_.wind().tau);
  o.a_prev = a_prev_;
  o.d_obstacles =
      raycast_scan(world_, state_.pose, config_.n_beams, config_.sensor_range, state_.t).ranges;
  return o;
}

Observation RlEnvironment::reset(std::uint64_t seed) {
  if (!configured_) throw Unconfigured("env: reset on an unconfigured environment");
  seed_ = seed;
  state_ = state_from_absolute(world_.spawn(), {}, world_.current());
  a_prev_ = {0.0, 0.5};
  steps_ = 0;
  active_ = true;
  done_ = false;
  return observe(a_prev_);
}

void RlEnvironment::require_active() const {
  if (!configured_) throw Unconfigured("env: step on an unconfigured environment");
  if (!active_) throw EpisodeFinished("env: no active episode, call reset first");
  if (done_) throw EpisodeFinished("env: episode finished, call reset");
}

StepResult RlEnvironment::step(const ActionSpec& action) {
  require_active();
  if (!std::isfinite(action.thrust) || !std::isfinite(action.angle)) {
    throw ValidationError("env: action must be finite");
  }
  StepResult out;
  const ActionSpec a = action.clamped(&out.info.action_clamped);
  const Vec3 tau = thruster_allocation(ControlCommand({{a.thrust, a.angle}}), params_);

  const Pose prev = state_.pose;
  const int substeps = std::max(1, static_cast<int>(std::lround(config_.step_period / config_.dt)));
  const double dt = config_.step_period / substeps;
  Outcome outcome = Outcome::none;
  for (int k = 0; k < substeps && outcome == Outcome::none; ++k) {
    state_ = step_with_force(state_, tau, world_.current(), world_.wind(), params_, dt);
    if (collision_check(world_, state_.pose, footprint_)) {
      outcome = Outcome::collision;
    } else if (norm(world_.goal() - state_.pose.position()) <= config_.reward.goal_radius) {
      outcome = Outcome::goal;
    }
  }
  ++steps_;
  if (outcome == Outcome::none && steps_ >= config_.reward.max_steps) outcome = Outcome::timeout;

  a_prev_ = a;
  out.info.outcome = outcome;
  out.info.terms = compute_reward(prev, state_.pose, world_.goal(), outcome, config_.reward);
  out.reward = out.info.terms.total;
  out.done = outcome != Outcome::none;
  done_ = out.done;
  out.obs = observe(a);
  return out;
}

StepResult RlEnvironment::abort_episode() {
  require_active();
  StepResult out;
  out.info.outcome = Outcome::collision;
  out.info.terms =
      compute_reward(state_.pose, state_.pose, world_.goal(), Outcome::collision, config_.reward);
  out.reward = out.info.terms.total;
  out.done = true;
  done_ = true;
  out.obs = observe(a_prev_);
  return out;
}

Policy random_policy(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const Observation&, const RlEnvironment&) {
    const double thrust = rng->uniform(ActionSpec::kThrustMin, ActionSpec::kThrustMax);
    const double angle = rng->uniform(ActionSpec::kAngleMin, ActionSpec::kAngleMax);
    return ActionSpec{thrust, angle};
  };
}

Policy scripted_policy(ScriptedPolicyGains gains) {
  return [gains](const Observation& obs, const RlEnvironment& env) {
    const double err = heading_error(env.state().pose, env.world().goal());
    // A positive yaw moment needs a thruster angle with the sign of its dx.
    const double sign = env.params().thrusters.front().dx < 0.0 ? -1.0 : 1.0;
    const double angle = 0.5 + sign * (gains.k_heading * err - gains.k_yaw_rate * obs.nu.r);
    return ActionSpec{gains.cruise_thrust, angle}.clamped();
  };
}

std::vector<EpisodeStats> run_policy(RlEnvironment& env, const Policy& policy, int n_episodes,
                                     std::uint64_t base_seed, std::vector<StepLogRow>* log) {
  std::vector<EpisodeStats> stats;
  int successes = 0;
  for (int ep = 0; ep < n_episodes; ++ep) {
    Observation obs = env.reset(base_seed + static_cast<std::uint64_t>(ep));
    EpisodeStats st;
    st.episode_index = ep;
    while (!env.done()) {
      const ActionSpec action = policy(obs, env);
      StepResult r;
      if (!std::isfinite(action.thrust) || !std::isfinite(action.angle)) {
        spdlog::warn("episode {} step {}: non-finite action, aborting", ep, env.steps());
        r = env.abort_episode();
      } else {
        r = env.step(action);
      }
      st.cumulative_reward += r.reward;
      st.outcome = r.info.outcome;
      if (log) log->push_back({ep, env.steps(), r.obs, action, r.info.terms, r.info.outcome});
      obs = std::move(r.obs);
    }
    st.steps = env.steps();
    if (st.outcome == Outcome::goal) ++successes;
    st.success_rate_running = static_cast<double>(successes) / static_cast<double>(ep + 1);
    stats.push_back(st);
  }
  return stats;
}

void write_episode_log_csv(std::ostream& out, const std::vector<StepLogRow>& rows) {
  out << "episode,step,d_goal,theta,u,v,r,min_obstacle,thrust,angle,"
         "r_distance,r_direction,r_heading,r_end,reward,outcome\n";
  for (const auto& row : rows) {
    const auto& o = row.obs;
    const double min_obs = o.d_obstacles.empty()
                               ? 0.0
                               : *std::min_element(o.d_obstacles.begin(), o.d_obstacles.end());
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.episode, row.step,
               o.d_goal, o.theta, o.nu.u, o.nu.v, o.nu.r, min_obs, row.action.thrust,
               row.action.angle, row.terms.distance, row.terms.direction, row.terms.heading,
               row.terms.end, row.terms.total, to_string(row.outcome));
  }
}

void write_episode_summary_csv(std::ostream& out, const std::vector<EpisodeStats>& stats) {
  out << "episode_index,steps,outcome,cumulative_reward,success_rate_running\n";
  for (const auto& s : stats) {
    fmt::print(out, "{},{},{},{},{}\n", s.episode_index, s.steps, to_string(s.outcome),
               s.cumulative_reward, s.success_rate_running);
  }
}

}  // namespace asv
