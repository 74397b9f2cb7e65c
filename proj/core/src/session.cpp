#include "asv/session.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <fmt/format.h>

namespace asv {

namespace {

namespace bai = boost::archive::iterators;

Json pose_json(const Pose& p) { return {{"x", p.x}, {"y", p.y}, {"psi", p.psi}}; }
Json vel_json(const BodyVelocity& v) { return {{"u", v.u}, {"v", v.v}, {"r", v.r}}; }

Json terms_json(const RewardTerms& t) {
  return {{"distance", t.distance}, {"direction", t.direction}, {"heading", t.heading},
          {"end", t.end}, {"total", t.total}};
}

Json stats_json(const EpisodeStats& s) {
  return {{"episode_index", s.episode_index}, {"steps", s.steps}, {"outcome", to_string(s.outcome)},
          {"cumulative_reward", s.cumulative_reward}, {"success_rate_running", s.success_rate_running}};
}

// Typed parameter access; type or range problems surface as invalid-params.
double number(const Json& params, const char* key) {
  if (!params.is_object() || !params.contains(key)) {
    throw ValidationError(fmt::format("missing parameter '{}'", key), "invalid-params");
  }
  const Json& v = params.at(key);
  if (!v.is_number()) throw ValidationError(fmt::format("parameter '{}' must be a number", key), "invalid-params");
  return v.get<double>();
}

double number_or(const Json& params, const char* key, double fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  return number(params, key);
}

std::vector<double> numbers(const Json& params, const char* key, std::size_t n) {
  const Json& v = params.is_object() && params.contains(key) ? params.at(key) : Json();
  if (!v.is_array() || (n != 0 && v.size() != n) ||
      !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); })) {
    throw ValidationError(fmt::format("parameter '{}' must be an array of {} numbers", key, n),
                          "invalid-params");
  }
  return v.get<std::vector<double>>();
}

}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  using It = bai::base64_from_binary<bai::transform_width<std::vector<std::uint8_t>::const_iterator, 6, 8>>;
  std::string out(It(bytes.begin()), It(bytes.end()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  using It = bai::transform_width<bai::binary_from_base64<std::string::const_iterator>, 8, 6>;
  std::string body = text;
  const auto pad = static_cast<std::size_t>(std::count(body.begin(), body.end(), '='));
  std::replace(body.begin(), body.end(), '=', 'A');
  std::vector<std::uint8_t> out(It(body.begin()), It(body.end()));
  out.resize(out.size() - std::min(pad, out.size()));
  return out;
}

SessionConfig session_config_from(const ScenarioDoc& doc, bool lockstep) {
  SessionConfig c;
  c.vessel = doc.vessel;
  c.world = doc.world;
  c.radar = doc.radar;
  c.dt = doc.dt;
  c.lockstep = lockstep;
  if (const auto* rl = std::get_if<RlController>(&doc.controller)) c.env = rl->env;
  c.env.dt = doc.dt;
  return c;
}

Session::Session(SessionConfig config) : config_(std::move(config)) {
  if (!(config_.dt > 0.0)) throw ValidationError("session: dt must be > 0");
  config_.radar.config.validate();
  if (!config_.vessel.finalized()) config_.vessel.finalize();
  world_ = std::make_shared<const ObstacleWorld>(config_.world);
  state_ = state_from_absolute(world_->spawn(), {}, world_->current());
  command_ = ControlCommand::neutral(config_.vessel.thrusters.size());
  rebuild_env();
  publish();
}

void Session::rebuild_env() {
  if (config_.vessel.thrusters.size() == 1) {
    env_ = RlEnvironment(*world_, config_.vessel, config_.env);
  } else {
    env_ = RlEnvironment();
  }
}

void Session::publish() {
  auto s = std::make_shared<Snapshot>();
  s->state = state_;
  s->command = command_;
  s->world = world_;
  s->vessel = config_.vessel;
  s->radar = config_.radar;
  s->episodes = episodes_;
  s->lockstep = config_.lockstep;
  s->episode_active = env_.active();
  std::lock_guard lock(snap_mutex_);
  snapshot_ = std::move(s);
}

std::shared_ptr<const Snapshot> Session::snapshot() const {
  std::lock_guard lock(snap_mutex_);
  return snapshot_;
}

Json Session::handshake() const {
  return {{"protocol", kProtocolName},
          {"version", kProtocolVersion},
          {"mode", config_.lockstep ? "lockstep" : "realtime"},
          {"lockstep", config_.lockstep},
          {"dt", config_.dt},
          {"vessel", config_.vessel.name},
          {"n_thrusters", config_.vessel.thrusters.size()},
          {"observation_size", 10 + config_.env.n_beams},
          {"action_low", {ActionSpec::kThrustMin, ActionSpec::kAngleMin}},
          {"action_high", {ActionSpec::kThrustMax, ActionSpec::kAngleMax}}};
}

bool Session::is_query(const std::string& m) {
  return m == "get_state" || m == "get_scan" || m == "get_radar" || m == "get_episode_stats";
}

bool Session::is_mutation(const std::string& m) {
  return m == "set_vessel_controls" || m == "set_current" || m == "set_wind" || m == "env_reset" ||
         m == "env_step" || m == "sim_step" || m == "pcg_generate";
}

void Session::tick() {
  const Vec3 tau = thruster_allocation(command_, config_.vessel);
  state_ = step_with_force(state_, tau, world_->current(), world_->wind(), config_.vessel, config_.dt);
  publish();
}

Json Session::call(const std::string& method, const Json& params) {
  Json result;
  if (method == "set_vessel_controls") {
    std::vector<ControlCommand::Channel> ch;
    if (params.is_object() && params.contains("controls")) {
      const Json& list = params.at("controls");
      if (!list.is_array()) throw ValidationError("'controls' must be an array", "invalid-params");
      for (const auto& c : list) ch.push_back({number(c, "thrust"), number_or(c, "angle", 0.5)});
    } else {
      const double thrust = number(params, "thrust");
      const double angle = number_or(params, "angle", 0.5);
      ch.assign(std::max<std::size_t>(1, config_.vessel.thrusters.size()), {thrust, angle});
    }
    if (ch.size() != config_.vessel.thrusters.size()) {
      throw ValidationError(fmt::format("vessel has {} thrusters, got {} commands",
                                        config_.vessel.thrusters.size(), ch.size()),
                            "invalid-params");
    }
    command_ = ControlCommand(std::move(ch));
    Json applied = Json::array();
    for (const auto& c : command_.channels()) applied.push_back({{"thrust", c.thrust}, {"angle", c.angle}});
    result = {{"applied", applied}};
  } else if (method == "set_current") {
    const CurrentSpec cur(number(params, "speed"), number_or(params, "heading", 0.0));
    // Keep the earth-frame velocity continuous across the change.
    const BodyVelocity nu = absolute_velocity(state_, world_->current());
    world_ = std::make_shared<const ObstacleWorld>(world_->with_environment(cur, world_->wind()));
    state_.nu_r = relative_velocity(nu, current_body(state_.pose.psi, cur));
    rebuild_env();
    result = {{"speed", cur.speed()}, {"heading", cur.heading()}};
  } else if (method == "set_wind") {
    const auto t = numbers(params, "tau", 3);
    WindForce w{Vec3{t[0], t[1], t[2]}};
    if (!w.tau.allFinite()) throw ValidationError("wind must be finite", "invalid-params");
    world_ = std::make_shared<const ObstacleWorld>(world_->with_environment(world_->current(), w));
    rebuild_env();
    result = {{"tau", t}};
  } else if (method == "env_reset" || method == "env_step") {
    if (!config_.lockstep) throw ModeViolation(method + " is only available in lockstep mode");
    if (!env_.configured()) throw Unconfigured("environment needs a single-thruster vessel");
    if (method == "env_reset") {
      const double seed = number_or(params, "seed", 0.0);
      if (!(seed >= 0.0) || seed != std::floor(seed)) {
        throw ValidationError("seed must be a non-negative integer", "invalid-params");
      }
      const Observation obs = env_.reset(static_cast<std::uint64_t>(seed));
      episode_reward_ = 0.0;
      state_ = env_.state();
      command_ = ControlCommand({{obs.a_prev.thrust, obs.a_prev.angle}});
      result = {{"observation", obs.flatten()}};
    } else {
      ActionSpec a;
      if (params.is_object() && params.contains("action")) {
        const auto v = numbers(params, "action", 2);
        a = {v[0], v[1]};
      } else {
        a = {number(params, "thrust"), number(params, "angle")};
      }
      const StepResult r = env_.step(a);
      episode_reward_ += r.reward;
      state_ = env_.state();
      command_ = ControlCommand({{r.obs.a_prev.thrust, r.obs.a_prev.angle}});
      if (r.done) {
        if (r.info.outcome == Outcome::goal) ++successes_;
        const int idx = static_cast<int>(episodes_.size());
        episodes_.push_back({idx, env_.steps(), r.info.outcome, episode_reward_,
                             static_cast<double>(successes_) / static_cast<double>(idx + 1)});
      }
      result = {{"observation", r.obs.flatten()},
                {"reward", r.reward},
                {"done", r.done},
                {"info",
                 {{"outcome", to_string(r.info.outcome)},
                  {"terms", terms_json(r.info.terms)},
                  {"action_clamped", r.info.action_clamped},
                  {"steps", env_.steps()}}}};
    }
  } else if (method == "sim_step") {
    if (!config_.lockstep) throw ModeViolation("sim_step is only available in lockstep mode");
    if (env_.active()) throw ModeViolation("an episode is running; advance it with env_step");
    const double n = number_or(params, "n", 1.0);
    if (!(n >= 0.0) || n != std::floor(n)) {
      throw ValidationError("n must be a non-negative integer", "invalid-params");
    }
    const Vec3 tau = thruster_allocation(command_, config_.vessel);
    for (long i = 0; i < static_cast<long>(n); ++i) {
      state_ = step_with_force(state_, tau, world_->current(), world_->wind(), config_.vessel, config_.dt);
    }
    result = {{"t", state_.t}, {"steps", static_cast<long>(n)}};
  } else if (method == "pcg_generate") {
    PcgParams p;
    p.n_segments = static_cast<int>(number_or(params, "n_segments", p.n_segments));
    p.seed = static_cast<std::uint64_t>(number_or(params, "seed", static_cast<double>(p.seed)));
    if (params.is_object() && params.contains("width")) {
      const auto w = numbers(params, "width", 2);
      p.width_min = w[0];
      p.width_max = w[1];
    }
    p.angle_max = number_or(params, "angle_max", p.angle_max);
    if (params.is_object() && params.contains("length")) {
      const auto l = numbers(params, "length", 2);
      p.length_min = l[0];
      p.length_max = l[1];
    }
    const ObstacleWorld w = generate_channel(p).with_environment(world_->current(), world_->wind());
    Json centerline = Json::array();
    for (const auto& c : w.channel()->centerline) centerline.push_back({c.x, c.y});
    result = {{"n_segments", p.n_segments},
              {"seed", p.seed},
              {"n_obstacles", w.obstacles().size()},
              {"n_edges", w.segments().size()},
              {"centerline", centerline},
              {"widths", w.channel()->joint_widths},
              {"spawn", pose_json(w.spawn())},
              {"goal", {w.goal().x, w.goal().y}}};
    const bool load = params.is_object() && params.value("load", false);
    if (load) {
      world_ = std::make_shared<const ObstacleWorld>(w);
      state_ = state_from_absolute(world_->spawn(), {}, world_->current());
      command_ = ControlCommand::neutral(config_.vessel.thrusters.size());
      rebuild_env();
    }
    result["loaded"] = load;
  } else {
    throw std::out_of_range(method);
  }
  publish();
  return result;
}

Json Session::query(const Snapshot& snap, const std::string& method, const Json& params) {
  const CurrentSpec& cur = snap.world->current();
  if (method == "get_state") {
    Json controls = Json::array();
    for (const auto& c : snap.command.channels()) controls.push_back({{"thrust", c.thrust}, {"angle", c.angle}});
    return {{"t", snap.state.t},
            {"pose", pose_json(snap.state.pose)},
            {"nu", vel_json(absolute_velocity(snap.state, cur))},
            {"nu_r", vel_json(snap.state.nu_r)},
            {"controls", controls},
            {"current", {{"speed", cur.speed()}, {"heading", cur.heading()}}},
            {"wind", {snap.world->wind().tau[0], snap.world->wind().tau[1], snap.world->wind().tau[2]}}};
  }
  if (method == "get_episode_stats") {
    Json list = Json::array();
    for (const auto& s : snap.episodes) list.push_back(stats_json(s));
    return {{"episodes", list}};
  }
  const int n_beams = static_cast<int>(number_or(params, "n_beams", snap.radar.n_beams));
  const double range = number_or(params, "max_range", snap.radar.sensor_range);
  const ScanFrame scan = raycast_scan(*snap.world, snap.state.pose, n_beams, range, snap.state.t);
  if (method == "get_scan") {
    Json pts = Json::array();
    for (const auto& p : scan.points) pts.push_back(p ? Json{p->x, p->y} : Json());
    return {{"origin", pose_json(scan.origin)}, {"max_range", scan.max_range},
            {"timestamp", scan.timestamp}, {"ranges", scan.ranges}, {"points", pts}};
  }
  if (method == "get_radar") {
    RadarConfig rc = snap.radar.config;
    rc.extent_mode = ExtentMode::fixed_metric;
    rc.max_range = range;
    const RadarFrame f = rasterize(scan.hits(), rc, snap.state.pose.position(), snap.state.t);
    return {{"size", f.size},
            {"timestamp", f.timestamp},
            {"extent", {{"min", {f.extent.min.x, f.extent.min.y}}, {"span", {f.extent.span.x, f.extent.span.y}}}},
            {"radar_pixel", {f.radar_pixel.x, f.radar_pixel.y}},
            {"layout", "row-major, pixels[y * size + x], 0/1"},
            {"encoding", "base64"},
            {"pixels", base64_encode(f.pixels)}};
  }
  throw std::out_of_range(method);
}

}  // namespace asv
