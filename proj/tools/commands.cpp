#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include "asv/control.hpp"
#include "asv/navigation.hpp"
#include "asv/radar_io.hpp"
#include "asv/rl_env.hpp"
#include "asv/rpc_server.hpp"
#include "asv/scenario.hpp"
#include "asv/session.hpp"
#include "asv/vessel_io.hpp"
#include "asv/world_export.hpp"

#ifndef ASV_DATA_DIR
#define ASV_DATA_DIR "data"
#endif

namespace asvsim {

using namespace asv;

fs::path data_dir() {
  if (const char* env = std::getenv("ASVSIM_DATA")) return env;
  return ASV_DATA_DIR;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
}

ScenarioDoc load(const CommonOptions& opt, const fs::path& fallback = {}) {
  fs::path path;
  if (opt.scenario) {
    path = *opt.scenario;
  } else if (!fallback.empty()) {
    path = fallback;
  } else {
    throw ValidationError("--scenario is required");
  }
  if (!fs::exists(path)) throw ConfigError(fmt::format("scenario '{}' not found", path.string()));
  ScenarioDoc doc = load_scenario_file(path);

  if (opt.dt) {
    if (!(*opt.dt > 0.0)) throw ValidationError("--dt must be > 0");
    doc.dt = *opt.dt;
    if (auto* pid = std::get_if<PidController>(&doc.controller)) pid->config.dt = doc.dt;
    if (auto* dwa = std::get_if<DwaController>(&doc.controller)) dwa->config.dt = doc.dt;
    if (auto* rl = std::get_if<RlController>(&doc.controller)) rl->env.dt = doc.dt;
  }
  if (opt.seed) {
    doc.seed = *opt.seed;
    if (doc.pcg) {
      doc.pcg->seed = *opt.seed;
      const Environment env0 = doc.schedule.at(0.0);
      doc.world = build_pcg_world(*doc.pcg, doc.moored).with_environment(env0.current, env0.wind);
    }
  }
  return doc;
}

struct RunSummary {
  double max_abs_y = 0.0;
  double final_speed = 0.0;
  TrajectoryRow last;
};

RunSummary summarize(const std::vector<TrajectoryRow>& rows) {
  RunSummary s;
  for (const auto& r : rows) s.max_abs_y = std::max(s.max_abs_y, std::abs(r.y));
  s.last = rows.back();
  s.final_speed = std::hypot(s.last.u, s.last.v);
  return s;
}

int run_trajectories(const ScenarioDoc& doc, const fs::path& out) {
  if (doc.current_sweep.empty()) {
    const auto rows = simulate(doc, doc.schedule);
    auto f = open_out(out / (doc.name + ".csv"));
    write_trajectory_csv(f, rows);
    const RunSummary s = summarize(rows);
    fmt::print("scenario: {}\ncontroller: {}\nrows: {}\nfinal: t={} x={} y={} psi={}\nfinal_speed: {}\nmax_abs_y: {}\n",
               doc.name, controller_name(doc.controller), rows.size(), s.last.t, s.last.x, s.last.y,
               s.last.psi, s.final_speed, s.max_abs_y);
    return kExitOk;
  }
  auto summary = open_out(out / (doc.name + "_summary.csv"));
  summary << "current_speed,max_abs_y,final_speed,final_psi,file\n";
  fmt::print("scenario: {}\n", doc.name);
  for (double vc : doc.current_sweep) {
    const auto rows = simulate(doc, doc.schedule.with_current_speed(vc));
    const std::string file = fmt::format("{}_vc{}.csv", doc.name, vc);
    auto f = open_out(out / file);
    write_trajectory_csv(f, rows);
    const RunSummary s = summarize(rows);
    fmt::print(summary, "{},{},{},{},{}\n", vc, s.max_abs_y, s.final_speed, s.last.psi, file);
    fmt::print("V_c={}: max|y|={} final_speed={} final_psi={} -> {}\n", vc, s.max_abs_y, s.final_speed,
               s.last.psi, file);
  }
  return kExitOk;
}

int run_navigation(const ScenarioDoc& doc, NavigatorConfig cfg, const fs::path& out, bool candidates) {
  cfg.record_candidates = candidates;
  const ThrustSpeedTable table = ThrustSpeedTable::calibrate(doc.vessel);
  const NavResult r = navigate(doc.world, doc.vessel, cfg, table);
  {
    auto f = open_out(out / (doc.name + "_trajectory.csv"));
    write_trajectory_csv(f, r.trajectory);
  }
  if (candidates) {
    auto f = open_out(out / (doc.name + "_candidates.csv"));
    write_candidates_csv(f, r.candidates);
  }
  fmt::print("scenario: {}\noutcome: {}\nplan_steps: {}\ncollision_hits: {}\nmin_clearance: {}\nfinal_t: {}\n",
             doc.name, to_string(r.outcome), r.plan_steps, r.collision_hits, r.min_clearance,
             r.trajectory.empty() ? 0.0 : r.trajectory.back().t);
  switch (r.outcome) {
    case NavOutcome::goal: return r.collision_hits == 0 ? kExitOk : kExitGoalNotReached;
    case NavOutcome::infeasible:
      spdlog::error("no feasible trajectory at plan step {}: {}", r.failed_step.value_or(0), r.message);
      return kExitRuntime;
    case NavOutcome::collision:
    case NavOutcome::timeout:
      spdlog::error("{}: {}", to_string(r.outcome), r.message);
      return kExitGoalNotReached;
  }
  return kExitRuntime;
}

int run_episodes(const ScenarioDoc& doc, const RlController& rl, const fs::path& out) {
  RlEnvironment env(doc.world, doc.vessel, rl.env);
  const Policy policy = rl.policy == "random" ? random_policy(doc.seed) : scripted_policy(rl.gains);
  std::vector<StepLogRow> log;
  const auto stats = run_policy(env, policy, rl.episodes, doc.seed, &log);
  {
    auto f = open_out(out / (doc.name + "_steps.csv"));
    write_episode_log_csv(f, log);
  }
  {
    auto f = open_out(out / (doc.name + "_episodes.csv"));
    write_episode_summary_csv(f, stats);
  }
  fmt::print("scenario: {}\npolicy: {}\nepisodes: {}\n", doc.name, rl.policy, stats.size());
  for (const auto& s : stats) {
    fmt::print("episode {}: outcome={} steps={} reward={}\n", s.episode_index, to_string(s.outcome),
               s.steps, s.cumulative_reward);
  }
  if (!stats.empty()) fmt::print("success_rate: {}\n", stats.back().success_rate_running);
  return kExitOk;
}

}  // namespace

int cmd_run(const CommonOptions& opt) {
  const ScenarioDoc doc = load(opt);
  ensure_dir(opt.out);
  if (const auto* dwa = std::get_if<DwaController>(&doc.controller)) {
    return run_navigation(doc, dwa->config, opt.out, true);
  }
  if (const auto* rl = std::get_if<RlController>(&doc.controller)) return run_episodes(doc, *rl, opt.out);
  return run_trajectories(doc, opt.out);
}

int cmd_pid_demo(const CommonOptions& opt, const PidDemoOptions& pid) {
  VesselParams vessel;
  Environment env;
  PidDemoConfig cfg;
  if (opt.scenario) {
    const ScenarioDoc doc = load(opt);
    vessel = doc.vessel;
    env = doc.schedule.at(0.0);
    if (const auto* p = std::get_if<PidController>(&doc.controller)) cfg = p->config;
  } else {
    vessel = load_model_file(pid.vessel.value_or(data_dir() / "vessels" / "example-ferry.yaml"));
    cfg.kp = pid.kp;
    cfg.ki = pid.ki;
    cfg.kd = pid.kd;
    cfg.target_speed = pid.target;
    cfg.duration = pid.duration;
    if (opt.dt) cfg.dt = *opt.dt;
  }
  ensure_dir(opt.out);
  const auto log = run_pid_demo(vessel, cfg, env);
  auto f = open_out(opt.out / "pid.csv");
  f << "t,speed,thrust\n";
  for (const auto& s : log) {
    fmt::print(f, "{},{},{}\n", s.t, s.speed, s.thrust);
    spdlog::info("t={:6.1f} s  speed={:.4f} m/s  thrust={:.4f}", s.t, s.speed, s.thrust);
  }
  if (!log.empty()) {
    fmt::print("target: {}\nfinal_speed: {}\nfinal_thrust: {}\n", cfg.target_speed, log.back().speed,
               log.back().thrust);
  }
  return kExitOk;
}

namespace {

std::vector<Vec2> read_points_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure(fmt::format("cannot read '{}'", path.string()));
  std::vector<Vec2> pts;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#' || (n == 1 && line.find_first_of("xX") != std::string::npos)) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Vec2 p;
    if (!(ss >> p.x >> p.y)) throw ParseError(fmt::format("{}:{}: expected 'x,y'", path.string(), n));
    pts.push_back(p);
  }
  return pts;
}

void write_frame(const RadarFrame& frame, const RadarConfig& cfg, const fs::path& out, std::size_t index,
                 bool png) {
  const std::string stem = fmt::format("frame_{:04d}", index);
  write_pgm(frame, out / (stem + ".pgm"));
  if (png) write_png(frame, out / (stem + ".png"));
  write_metadata(frame, cfg, out / (stem + ".yaml"));
}

}  // namespace

int cmd_radar_render(const CommonOptions& opt, const RadarRenderOptions& ro) {
  ensure_dir(opt.out);
  auto index = open_out(opt.out / "frames.csv");
  index << "frame,timestamp,x,y,psi,set_pixels\n";

  if (ro.points) {
    RadarConfig cfg;
    cfg.image_size = ro.image_size;
    cfg.alpha = ro.alpha;
    cfg.beta = ro.beta;
    cfg.max_range = ro.max_range;
    if (ro.mode == "paper_normalized") {
      cfg.extent_mode = ExtentMode::paper_normalized;
    } else if (ro.mode != "fixed_metric") {
      throw ValidationError("--mode must be fixed_metric or paper_normalized");
    }
    const auto pts = read_points_csv(*ro.points);
    const Vec2 origin{ro.origin_x, ro.origin_y};
    const RadarFrame frame = rasterize(pts, cfg, origin, 0.0);
    write_frame(frame, cfg, opt.out, 0, ro.png);
    fmt::print(index, "0,0,{},{},0,{}\n", origin.x, origin.y, frame.count_set());
    fmt::print("frames: 1\nset_pixels: {}\n", frame.count_set());
    return kExitOk;
  }

  const ScenarioDoc doc = load(opt);
  if (!std::holds_alternative<OpenLoopController>(doc.controller) &&
      !std::holds_alternative<PidController>(doc.controller)) {
    throw ValidationError("radar-render needs an open_loop or pid scenario");
  }
  const RadarConfig& cfg = doc.radar.config;
  const auto rows = simulate(doc, doc.schedule);
  const double period = cfg.frame_period();
  const double row_dt = rows.size() > 1 ? rows[1].t - rows[0].t : doc.dt;
  std::size_t frames = 0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * period;
    if (t > rows.back().t + 1e-9) break;
    const auto i = std::min(rows.size() - 1, static_cast<std::size_t>(std::llround(t / row_dt)));
    const Pose pose{rows[i].x, rows[i].y, rows[i].psi};
    const ScanFrame scan = raycast_scan(doc.world, pose, doc.radar.n_beams, doc.radar.sensor_range, t);
    const RadarFrame frame = rasterize(scan.hits(), cfg, pose.position(), t);
    write_frame(frame, cfg, opt.out, k, ro.png);
    fmt::print(index, "{},{},{},{},{},{}\n", k, t, pose.x, pose.y, pose.psi, frame.count_set());
    ++frames;
  }
  fmt::print("scenario: {}\nframes: {}\nframe_period: {}\n", doc.name, frames, period);
  return kExitOk;
}

int cmd_dwa_demo(const CommonOptions& opt, const DwaDemoOptions& dwa) {
  ScenarioDoc doc = load(opt, data_dir() / "scenarios" / "channel-dwa.yaml");
  const auto* ctl = std::get_if<DwaController>(&doc.controller);
  if (!ctl) throw ValidationError(fmt::format("dwa-demo needs a dwa scenario, '{}' uses {}", doc.name,
                                              controller_name(doc.controller)));
  if (dwa.goal_x || dwa.goal_y) {
    doc.world = doc.world.with_goal({dwa.goal_x.value_or(doc.world.goal().x), dwa.goal_y.value_or(doc.world.goal().y)});
  }
  ensure_dir(opt.out);
  return run_navigation(doc, ctl->config, opt.out, dwa.candidates);
}

int cmd_pcg_preview(const CommonOptions& opt, const PcgPreviewOptions& po) {
  PcgParams p;
  std::vector<MooredVessel> moored;
  if (opt.scenario) {
    const ScenarioDoc doc = load(opt);
    if (!doc.pcg) throw ValidationError(fmt::format("scenario '{}' has no pcg section", doc.name));
    p = *doc.pcg;
    moored = doc.moored;
  } else {
    p.n_segments = po.n_segments;
    p.width_min = po.width_min;
    p.width_max = po.width_max;
    p.angle_max = po.angle_max;
    p.length_min = po.length_min;
    p.length_max = po.length_max;
    if (opt.seed) p.seed = *opt.seed;
  }
  p.validate();
  const ObstacleWorld world = build_pcg_world(p, moored);
  ensure_dir(opt.out);
  const std::string stem = fmt::format("channel_seed{}", p.seed);
  {
    auto f = open_out(opt.out / (stem + ".csv"));
    write_world_csv(f, world);
  }
  {
    auto f = open_out(opt.out / (stem + ".svg"));
    write_world_svg(f, world);
  }
  fmt::print("seed: {}\nsections: {}\ngoal: {},{}\nfiles: {}.csv {}.svg\n", p.seed,
             world.channel()->sections.size(), world.goal().x, world.goal().y, stem, stem);
  return kExitOk;
}

int cmd_serve(const CommonOptions& opt, const ServeOptions& so) {
  if (so.port < 0 || so.port > 65535) {
    spdlog::error("bind-failed: invalid port {}", so.port);
    return kExitBind;
  }
  SessionConfig cfg;
  if (opt.scenario) {
    cfg = session_config_from(load(opt), !so.realtime);
  } else {
    cfg.vessel = load_model_file(data_dir() / "vessels" / "example-ferry.yaml");
    cfg.world = ObstacleWorld({}, {100.0, 0.0}, {});
    cfg.lockstep = !so.realtime;
    if (opt.dt) cfg.dt = *opt.dt;
  }
  RpcServer server(std::move(cfg), {so.host, static_cast<std::uint16_t>(so.port), so.realtime_factor});
  try {
    server.start();
  } catch (const RuntimeFailure& e) {
    spdlog::error("{}", e.what());
    return kExitBind;
  }
  fmt::print("listening {}:{}\n", so.host, server.port());
  std::fflush(stdout);
  server.wait();
  return kExitOk;
}

}  // namespace asvsim
