#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "asv/scenario.hpp"
#include "asv/vessel_io.hpp"
#include "yaml_util.hpp"

namespace asv {

using detail::get;
using detail::get_or;
using detail::require;
using detail::where;

EnvironmentSchedule::EnvironmentSchedule(std::vector<EnvironmentPhase> phases)
    : phases_(std::move(phases)) {
  if (phases_.empty()) phases_.push_back({});
  if (phases_.front().t_start != 0.0) throw ValidationError("schedule: first phase must start at t = 0");
  for (std::size_t i = 1; i < phases_.size(); ++i) {
    if (!(phases_[i].t_start > phases_[i - 1].t_start)) {
      throw ValidationError("schedule: phase start times must be strictly increasing");
    }
  }
}

Environment EnvironmentSchedule::at(double t) const {
  const EnvironmentPhase* p = &phases_.front();
  for (const auto& ph : phases_) {
    if (ph.t_start <= t) p = &ph;
  }
  return {p->current, p->wind};
}

EnvironmentSchedule EnvironmentSchedule::with_current_speed(double speed) const {
  auto phases = phases_;
  for (auto& p : phases) p.current = CurrentSpec(speed, p.current.heading());
  return EnvironmentSchedule(std::move(phases));
}

const char* controller_name(const ControllerSpec& c) {
  struct Name {
    const char* operator()(const OpenLoopController&) const { return "open_loop"; }
    const char* operator()(const PidController&) const { return "pid"; }
    const char* operator()(const DwaController&) const { return "dwa"; }
    const char* operator()(const RlController&) const { return "rl"; }
  };
  return std::visit(Name{}, c);
}

namespace {

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed,
                const std::string& source) {
  if (!node.IsMap()) throw ParseError(fmt::format("{}: expected a mapping", where(source, node)));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) {
      throw ParseError(fmt::format("{}: unknown field '{}'", where(source, kv.first), key));
    }
  }
}

Vec2 read_point(const YAML::Node& n, const std::string& field, const std::string& source) {
  const auto v = detail::numbers(n, 2, field, source);
  return {v[0], v[1]};
}

// Wraps validation errors raised while building a value with the node's location.
template <typename F>
auto at_node(const YAML::Node& n, const std::string& source, F&& build) {
  try {
    return build();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", where(source, n), e.what()), e.code());
  }
}

double read_heading(const YAML::Node& n, const std::string& source) {
  if (n["heading_deg"]) return deg2rad(get<double>(n, "heading_deg", source));
  return get_or<double>(n, "heading", 0.0, source);
}

CurrentSpec read_current(const YAML::Node& n, const std::string& source) {
  check_keys(n, {"speed", "heading", "heading_deg"}, source);
  return at_node(n, source, [&] { return CurrentSpec(get<double>(n, "speed", source), read_heading(n, source)); });
}

WindForce read_wind(const YAML::Node& n, const std::string& source) {
  const auto v = detail::numbers(n, 3, "wind", source);
  return {Vec3{v[0], v[1], v[2]}};
}

Pose read_pose(const YAML::Node& n, const std::string& source) {
  check_keys(n, {"x", "y", "psi", "psi_deg"}, source);
  Pose p{get_or<double>(n, "x", 0.0, source), get_or<double>(n, "y", 0.0, source), 0.0};
  p.psi = wrap_angle(n["psi_deg"] ? deg2rad(get<double>(n, "psi_deg", source))
                                  : get_or<double>(n, "psi", 0.0, source));
  return p;
}

std::vector<Obstacle> read_obstacles(const YAML::Node& n, const std::string& source) {
  std::vector<Obstacle> out;
  if (!n) return out;
  if (!n.IsSequence()) throw ParseError(fmt::format("{}: 'obstacles' must be a list", where(source, n)));
  for (const auto& o : n) {
    if (o["center"]) {
      check_keys(o, {"center", "length", "width", "heading", "heading_deg"}, source);
      out.push_back(at_node(o, source, [&] {
        return rectangle(read_point(o["center"], "center", source), get<double>(o, "length", source),
                         get<double>(o, "width", source), read_heading(o, source));
      }));
      continue;
    }
    check_keys(o, {"vertices", "closed"}, source);
    Obstacle ob;
    ob.closed = get_or<bool>(o, "closed", false, source);
    const auto vs = require(o, "vertices", source);
    if (!vs.IsSequence()) throw ParseError(fmt::format("{}: 'vertices' must be a list", where(source, vs)));
    for (const auto& v : vs) ob.vertices.push_back(read_point(v, "vertices", source));
    out.push_back(std::move(ob));
  }
  return out;
}

struct WorldBlock {
  std::vector<Obstacle> obstacles;
  Vec2 goal;
  Pose spawn;
  std::optional<CurrentSpec> current;
  std::optional<WindForce> wind;
};

WorldBlock read_world_block(const YAML::Node& n, const std::string& source) {
  check_keys(n, {"spawn", "goal", "obstacles", "current", "wind"}, source);
  WorldBlock w;
  w.obstacles = read_obstacles(n["obstacles"], source);
  w.goal = read_point(require(n, "goal", source), "goal", source);
  if (n["spawn"]) w.spawn = read_pose(n["spawn"], source);
  if (n["current"]) w.current = read_current(n["current"], source);
  if (n["wind"]) w.wind = read_wind(n["wind"], source);
  return w;
}

ObstacleWorld make_world(const WorldBlock& w, const YAML::Node& n, const std::string& source) {
  return at_node(n, source, [&] {
    return ObstacleWorld(w.obstacles, w.goal, w.spawn, w.current.value_or(CurrentSpec{}),
                         w.wind.value_or(WindForce{}));
  });
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open {} '{}'", what, path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PcgParams read_pcg(const YAML::Node& n, const std::string& source) {
  check_keys(n, {"n_segments", "seed", "width", "angle_max", "length", "moored"}, source);
  PcgParams p;
  p.n_segments = get_or<int>(n, "n_segments", p.n_segments, source);
  p.seed = get_or<std::uint64_t>(n, "seed", p.seed, source);
  if (n["width"]) {
    const auto w = detail::numbers(n["width"], 2, "width", source);
    p.width_min = w[0];
    p.width_max = w[1];
  }
  p.angle_max = get_or<double>(n, "angle_max", p.angle_max, source);
  if (n["length"]) {
    const auto l = detail::numbers(n["length"], 2, "length", source);
    p.length_min = l[0];
    p.length_max = l[1];
  }
  at_node(n, source, [&] {
    p.validate();
    return 0;
  });
  return p;
}

std::vector<MooredVessel> read_moored(const YAML::Node& n, const std::string& source) {
  std::vector<MooredVessel> out;
  if (!n) return out;
  if (!n.IsSequence()) throw ParseError(fmt::format("{}: 'moored' must be a list", where(source, n)));
  for (const auto& m : n) {
    check_keys(m, {"segment", "side", "fraction", "length", "beam"}, source);
    MooredVessel mv;
    mv.segment = get<int>(m, "segment", source);
    const auto side = get_or<std::string>(m, "side", "left", source);
    if (side != "left" && side != "right") {
      throw ParseError(fmt::format("{}: side must be 'left' or 'right'", where(source, m["side"])));
    }
    mv.side = side == "left" ? BankSide::left : BankSide::right;
    mv.fraction = get_or<double>(m, "fraction", mv.fraction, source);
    mv.length = get_or<double>(m, "length", mv.length, source);
    mv.beam = get_or<double>(m, "beam", mv.beam, source);
    out.push_back(mv);
  }
  return out;
}

RadarConfig read_radar_config(const YAML::Node& n, RadarConfig c, const std::string& source) {
  c.image_size = get_or<int>(n, "image_size", c.image_size, source);
  c.alpha = get_or<double>(n, "alpha", c.alpha, source);
  c.beta = get_or<double>(n, "beta", c.beta, source);
  c.max_range = get_or<double>(n, "max_range", c.max_range, source);
  c.rotation_rpm = get_or<double>(n, "rotation_rpm", c.rotation_rpm, source);
  if (n["extent_mode"]) {
    const auto m = get<std::string>(n, "extent_mode", source);
    if (m == "fixed_metric") {
      c.extent_mode = ExtentMode::fixed_metric;
    } else if (m == "paper_normalized") {
      c.extent_mode = ExtentMode::paper_normalized;
    } else {
      throw ParseError(fmt::format("{}: extent_mode must be fixed_metric or paper_normalized",
                                   where(source, n["extent_mode"])));
    }
  }
  at_node(n, source, [&] {
    c.validate();
    return 0;
  });
  return c;
}

DwaConfig read_dwa(const YAML::Node& n, const std::string& source) {
  check_keys(n, {"v_max", "v_min", "omega_max", "accel_v", "accel_omega", "v_resolution",
                 "omega_resolution", "horizon", "rollout_dt", "gain_goal", "gain_obstacle",
                 "gain_speed", "d_threshold"},
             source);
  DwaConfig c;
  c.v_max = get_or(n, "v_max", c.v_max, source);
  c.v_min = get_or(n, "v_min", c.v_min, source);
  c.omega_max = get_or(n, "omega_max", c.omega_max, source);
  c.accel_v = get_or(n, "accel_v", c.accel_v, source);
  c.accel_omega = get_or(n, "accel_omega", c.accel_omega, source);
  c.v_resolution = get_or(n, "v_resolution", c.v_resolution, source);
  c.omega_resolution = get_or(n, "omega_resolution", c.omega_resolution, source);
  c.horizon = get_or(n, "horizon", c.horizon, source);
  c.rollout_dt = get_or(n, "rollout_dt", c.rollout_dt, source);
  c.gain_goal = get_or(n, "gain_goal", c.gain_goal, source);
  c.gain_obstacle = get_or(n, "gain_obstacle", c.gain_obstacle, source);
  c.gain_speed = get_or(n, "gain_speed", c.gain_speed, source);
  c.d_threshold = get_or(n, "d_threshold", c.d_threshold, source);
  at_node(n, source, [&] {
    c.validate();
    return 0;
  });
  return c;
}

ControllerSpec read_controller(const YAML::Node& n, const std::string& source) {
  const auto type = get<std::string>(n, "type", source);
  if (type == "open_loop") {
    check_keys(n, {"type", "script"}, source);
    OpenLoopController c;
    const auto script = require(n, "script", source);
    if (!script.IsSequence() || script.size() == 0) {
      throw ParseError(fmt::format("{}: 'script' must be a non-empty list", where(source, script)));
    }
    for (const auto& s : script) {
      check_keys(s, {"t", "thrust", "angle"}, source);
      c.script.push_back({get<double>(s, "t", source), get<double>(s, "thrust", source),
                          get_or<double>(s, "angle", 0.5, source)});
    }
    if (c.script.front().t != 0.0) {
      throw ParseError(fmt::format("{}: first script entry must have t = 0", where(source, script)));
    }
    for (std::size_t i = 1; i < c.script.size(); ++i) {
      if (!(c.script[i].t > c.script[i - 1].t)) {
        throw ParseError(fmt::format("{}: script times must increase", where(source, script[i])));
      }
    }
    return c;
  }
  if (type == "pid") {
    check_keys(n, {"type", "kp", "ki", "kd", "target_speed", "tick"}, source);
    PidController c;
    c.config.kp = get_or(n, "kp", c.config.kp, source);
    c.config.ki = get_or(n, "ki", c.config.ki, source);
    c.config.kd = get_or(n, "kd", c.config.kd, source);
    c.config.target_speed = get_or(n, "target_speed", c.config.target_speed, source);
    c.config.tick = get_or(n, "tick", c.config.tick, source);
    return c;
  }
  if (type == "dwa") {
    check_keys(n, {"type", "dwa", "plan_period", "control_period", "max_time", "goal_radius",
                   "waypoint_lookahead", "source", "n_beams", "sensor_range", "radar", "decimation",
                   "footprint_radius", "k_omega", "max_angle"},
               source);
    DwaController c;
    auto& k = c.config;
    if (n["dwa"]) k.dwa = read_dwa(n["dwa"], source);
    k.plan_period = get_or(n, "plan_period", k.plan_period, source);
    k.control_period = get_or(n, "control_period", k.control_period, source);
    k.max_time = get_or(n, "max_time", k.max_time, source);
    k.goal_radius = get_or(n, "goal_radius", k.goal_radius, source);
    k.waypoint_lookahead = get_or(n, "waypoint_lookahead", k.waypoint_lookahead, source);
    const auto src = get_or<std::string>(n, "source", "radar", source);
    if (src != "radar" && src != "scan") {
      throw ParseError(fmt::format("{}: source must be 'radar' or 'scan'", where(source, n["source"])));
    }
    k.source = src == "radar" ? ObstacleSource::radar : ObstacleSource::scan;
    k.n_beams = get_or(n, "n_beams", k.n_beams, source);
    k.sensor_range = get_or(n, "sensor_range", k.sensor_range, source);
    k.radar.max_range = k.sensor_range;
    if (n["radar"]) {
      check_keys(n["radar"], {"image_size", "alpha", "beta"}, source);
      k.radar = read_radar_config(n["radar"], k.radar, source);
    }
    k.decimation = get_or(n, "decimation", k.decimation, source);
    k.footprint_radius = get_or(n, "footprint_radius", k.footprint_radius, source);
    k.tracker.k_omega = get_or(n, "k_omega", k.tracker.k_omega, source);
    k.tracker.max_angle = get_or(n, "max_angle", k.tracker.max_angle, source);
    return c;
  }
  if (type == "rl") {
    check_keys(n, {"type", "policy", "episodes", "g1", "g2", "g3", "goal_radius", "max_steps",
                   "n_beams", "sensor_range", "footprint_radius", "cruise_thrust", "k_heading",
                   "k_yaw_rate"},
               source);
    RlController c;
    c.policy = get_or<std::string>(n, "policy", c.policy, source);
    if (c.policy != "scripted" && c.policy != "random") {
      throw ParseError(fmt::format("{}: policy must be 'scripted' or 'random'", where(source, n["policy"])));
    }
    c.episodes = get_or(n, "episodes", c.episodes, source);
    auto& r = c.env.reward;
    r.g1 = get_or(n, "g1", r.g1, source);
    r.g2 = get_or(n, "g2", r.g2, source);
    r.g3 = get_or(n, "g3", r.g3, source);
    r.goal_radius = get_or(n, "goal_radius", r.goal_radius, source);
    r.max_steps = get_or(n, "max_steps", r.max_steps, source);
    c.env.n_beams = get_or(n, "n_beams", c.env.n_beams, source);
    c.env.sensor_range = get_or(n, "sensor_range", c.env.sensor_range, source);
    c.env.footprint_radius = get_or(n, "footprint_radius", c.env.footprint_radius, source);
    c.gains.cruise_thrust = get_or(n, "cruise_thrust", c.gains.cruise_thrust, source);
    c.gains.k_heading = get_or(n, "k_heading", c.gains.k_heading, source);
    c.gains.k_yaw_rate = get_or(n, "k_yaw_rate", c.gains.k_yaw_rate, source);
    if (c.episodes < 0) throw ParseError(fmt::format("{}: episodes must be >= 0", where(source, n)));
    return c;
  }
  throw ParseError(fmt::format("{}: unknown controller type '{}' (open_loop, pid, dwa, rl)",
                               where(source, n["type"]), type));
}

}  // namespace

ObstacleWorld build_pcg_world(const PcgParams& params, const std::vector<MooredVessel>& moored) {
  ObstacleWorld w = generate_channel(params);
  std::vector<Obstacle> hulls;
  for (const auto& m : moored) hulls.push_back(place_moored(*w.channel(), m));
  return hulls.empty() ? w : w.with_obstacles(hulls);
}

ObstacleWorld load_world(const std::string& document, const std::string& source) {
  const YAML::Node root = detail::parse_yaml(document, source);
  return make_world(read_world_block(root, source), root, source);
}

ObstacleWorld load_world_file(const std::filesystem::path& path) {
  return load_world(read_file(path, "world document"), path.string());
}

ScenarioDoc load_scenario(const std::string& document, const std::string& source,
                          const std::filesystem::path& base_dir) {
  const YAML::Node root = detail::parse_yaml(document, source);
  check_keys(root, {"name", "vessel", "world", "pcg", "environment", "current_sweep", "dt",
                    "duration", "seed", "controller", "radar"},
             source);
  ScenarioDoc doc;
  doc.name = get_or<std::string>(root, "name", "scenario", source);
  doc.dt = get_or(root, "dt", doc.dt, source);
  doc.duration = get_or(root, "duration", doc.duration, source);
  doc.seed = get_or<std::uint64_t>(root, "seed", doc.seed, source);
  if (!(doc.dt > 0.0)) throw ParseError(fmt::format("{}: dt must be > 0", where(source, root["dt"])));
  if (!(doc.duration >= 0.0)) {
    throw ParseError(fmt::format("{}: duration must be >= 0", where(source, root["duration"])));
  }

  // Vessel reference
  const auto vnode = require(root, "vessel", source);
  const auto vref = detail::as<std::string>(vnode, "vessel", source);
  doc.vessel_path = base_dir / vref;
  if (!std::filesystem::exists(doc.vessel_path)) {
    throw ConfigError(fmt::format("{}: vessel reference '{}' not found (resolved to {})",
                                  where(source, vnode), vref, doc.vessel_path.string()));
  }
  doc.vessel = load_model_file(doc.vessel_path);

  // World: inline, by reference, or procedural
  if (root["world"] && root["pcg"]) {
    throw ParseError(fmt::format("{}: give either 'world' or 'pcg', not both", where(source, root["pcg"])));
  }
  if (const auto wn = root["world"]) {
    if (wn.IsScalar()) {
      const auto wref = detail::as<std::string>(wn, "world", source);
      const auto wpath = base_dir / wref;
      if (!std::filesystem::exists(wpath)) {
        throw ConfigError(fmt::format("{}: world reference '{}' not found", where(source, wn), wref));
      }
      doc.world = load_world_file(wpath);
    } else {
      doc.world = make_world(read_world_block(wn, source), wn, source);
    }
  } else if (const auto pn = root["pcg"]) {
    doc.pcg = read_pcg(pn, source);
    doc.moored = read_moored(pn["moored"], source);
    doc.world = at_node(pn, source, [&] { return build_pcg_world(*doc.pcg, doc.moored); });
  } else {
    doc.world = ObstacleWorld({}, {0.0, 0.0}, {});
  }

  // Environment schedule; the world's own environment seeds phase 0.
  EnvironmentPhase phase0{0.0, doc.world.current(), doc.world.wind()};
  std::vector<EnvironmentPhase> phases;
  if (const auto en = root["environment"]) {
    check_keys(en, {"current", "wind", "schedule"}, source);
    if (en["current"]) phase0.current = read_current(en["current"], source);
    if (en["wind"]) phase0.wind = read_wind(en["wind"], source);
    phases.push_back(phase0);
    if (const auto sn = en["schedule"]) {
      if (!sn.IsSequence()) throw ParseError(fmt::format("{}: 'schedule' must be a list", where(source, sn)));
      for (const auto& p : sn) {
        check_keys(p, {"t", "current", "wind"}, source);
        EnvironmentPhase ph = phases.back();
        ph.t_start = get<double>(p, "t", source);
        if (p["current"]) ph.current = read_current(p["current"], source);
        if (p["wind"]) ph.wind = read_wind(p["wind"], source);
        phases.push_back(ph);
      }
    }
    doc.schedule = at_node(en, source, [&] { return EnvironmentSchedule(phases); });
  } else {
    doc.schedule = EnvironmentSchedule({phase0});
  }
  const Environment env0 = doc.schedule.at(0.0);
  doc.world = doc.world.with_environment(env0.current, env0.wind);

  if (const auto cs = root["current_sweep"]) {
    doc.current_sweep = detail::numbers(cs, 0, "current_sweep", source);
    for (double v : doc.current_sweep) {
      if (!(v >= 0.0)) throw ParseError(fmt::format("{}: current speeds must be >= 0", where(source, cs)));
    }
  }

  if (const auto rn = root["radar"]) {
    check_keys(rn, {"image_size", "alpha", "beta", "max_range", "rotation_rpm", "extent_mode", "n_beams"},
               source);
    doc.radar.config = read_radar_config(rn, doc.radar.config, source);
    doc.radar.n_beams = get_or(rn, "n_beams", doc.radar.n_beams, source);
    doc.radar.sensor_range = doc.radar.config.max_range;
  }

  doc.controller = read_controller(require(root, "controller", source), source);
  if (auto* pid = std::get_if<PidController>(&doc.controller)) {
    pid->config.duration = doc.duration;
    pid->config.dt = doc.dt;
  }
  if (auto* dwa = std::get_if<DwaController>(&doc.controller)) dwa->config.dt = doc.dt;
  if (auto* rl = std::get_if<RlController>(&doc.controller)) rl->env.dt = doc.dt;
  return doc;
}

ScenarioDoc load_scenario_file(const std::filesystem::path& path) {
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return load_scenario(read_file(path, "scenario"), path.string(), base);
}

std::vector<TrajectoryRow> simulate(const ScenarioDoc& doc, const EnvironmentSchedule& schedule) {
  std::vector<TrajectoryRow> rows;
  if (const auto* pid = std::get_if<PidController>(&doc.controller)) {
    for (const auto& s : run_pid_demo(doc.vessel, pid->config, schedule.at(0.0))) {
      rows.push_back(make_row(s.state, schedule.at(s.t).current,
                              ControlCommand::uniform(doc.vessel.thrusters.size(), s.thrust, 0.5)));
    }
    return rows;
  }
  const auto* ol = std::get_if<OpenLoopController>(&doc.controller);
  if (!ol) {
    throw ConfigError(fmt::format("simulate: controller '{}' is not an open-loop or pid controller",
                                  controller_name(doc.controller)));
  }
  const auto steps = static_cast<long>(std::llround(doc.duration / doc.dt));
  SimState s = state_from_absolute(doc.world.spawn(), {}, schedule.at(0.0).current);
  std::size_t k = 0;
  auto command_at = [&](double t) {
    while (k + 1 < ol->script.size() && ol->script[k + 1].t <= t + 1e-12) ++k;
    const auto& e = ol->script[k];
    return ControlCommand::uniform(doc.vessel.thrusters.size(), e.thrust, e.angle);
  };
  for (long i = 0; i < steps; ++i) {
    const Environment env = schedule.at(s.t);
    const ControlCommand cmd = command_at(s.t);
    rows.push_back(make_row(s, env.current, cmd));
    s = step(s, cmd, env.current, env.wind, doc.vessel, doc.dt);
  }
  rows.push_back(make_row(s, schedule.at(s.t).current, command_at(s.t)));
  return rows;
}

}  // namespace asv
