#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

using namespace asvsim;

namespace {

void add_common(CLI::App* cmd, CommonOptions& opt, bool scenario_required) {
  auto* s = cmd->add_option("--scenario", opt.scenario, "Scenario YAML");
  if (scenario_required) s->required();
  cmd->add_option("--seed", opt.seed, "Seed override");
  cmd->add_option("--out", opt.out, "Output directory")->envname("ASVSIM_OUT");
  cmd->add_option("--dt", opt.dt, "Integration step override [s]");
}

int exit_code_for(const asv::Error& e) {
  if (e.code() == "bind-failed") return kExitBind;
  if (e.code() == "io") return kExitIo;
  if (dynamic_cast<const asv::ValidationError*>(&e)) return kExitValidation;
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("asvsim"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Surface-vessel simulator: dynamics, radar emulation, DWA planning and RL environment"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  CommonOptions run_opt;
  auto* run = app.add_subcommand("run", "Run a scenario and write its CSV outputs");
  add_common(run, run_opt, true);

  CommonOptions pid_common;
  PidDemoOptions pid_opt;
  auto* pid = app.add_subcommand("pid-demo", "Closed-loop speed hold with the PID controller");
  add_common(pid, pid_common, false);
  pid->add_option("--target", pid_opt.target, "Target speed over ground [m/s]");
  pid->add_option("--kp", pid_opt.kp);
  pid->add_option("--ki", pid_opt.ki);
  pid->add_option("--kd", pid_opt.kd);
  pid->add_option("--duration", pid_opt.duration, "Simulated seconds");
  pid->add_option("--vessel", pid_opt.vessel, "Vessel YAML");

  CommonOptions radar_common;
  RadarRenderOptions radar_opt;
  auto* radar = app.add_subcommand("radar-render", "Render radar frames from a scenario or a point CSV");
  add_common(radar, radar_common, false);
  radar->add_option("--points", radar_opt.points, "CSV of x,y detections");
  radar->add_option("--origin-x", radar_opt.origin_x);
  radar->add_option("--origin-y", radar_opt.origin_y);
  radar->add_option("--image-size", radar_opt.image_size);
  radar->add_option("--alpha", radar_opt.alpha);
  radar->add_option("--beta", radar_opt.beta);
  radar->add_option("--max-range", radar_opt.max_range);
  radar->add_option("--mode", radar_opt.mode)->check(CLI::IsMember({"fixed_metric", "paper_normalized"}));
  radar->add_flag("!--no-png", radar_opt.png, "Skip PNG output");

  CommonOptions dwa_common;
  DwaDemoOptions dwa_opt;
  auto* dwa = app.add_subcommand("dwa-demo", "Closed-loop DWA transit");
  add_common(dwa, dwa_common, false);
  dwa->add_option("--goal-x", dwa_opt.goal_x);
  dwa->add_option("--goal-y", dwa_opt.goal_y);
  dwa->add_flag("!--no-candidates", dwa_opt.candidates, "Skip the candidate log");

  CommonOptions pcg_common;
  PcgPreviewOptions pcg_opt;
  auto* pcg = app.add_subcommand("pcg-preview", "Generate a channel and write CSV and SVG previews");
  add_common(pcg, pcg_common, false);
  pcg->add_option("--segments", pcg_opt.n_segments);
  pcg->add_option("--width-min", pcg_opt.width_min);
  pcg->add_option("--width-max", pcg_opt.width_max);
  pcg->add_option("--angle-max", pcg_opt.angle_max);
  pcg->add_option("--length-min", pcg_opt.length_min);
  pcg->add_option("--length-max", pcg_opt.length_max);

  CommonOptions serve_common;
  ServeOptions serve_opt;
  auto* serve = app.add_subcommand("serve", "Serve the JSON-lines RPC interface");
  add_common(serve, serve_common, false);
  serve->add_option("--host", serve_opt.host);
  serve->add_option("--port", serve_opt.port)->envname("ASVSIM_PORT");
  auto* realtime = serve->add_flag("--realtime", serve_opt.realtime, "Advance on the wall clock");
  bool lockstep = false;
  serve->add_flag("--lockstep", lockstep, "Advance only on sim_step/env_step (default)")->excludes(realtime);
  serve->add_option("--realtime-factor", serve_opt.realtime_factor);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*run) return cmd_run(run_opt);
    if (*pid) return cmd_pid_demo(pid_common, pid_opt);
    if (*radar) return cmd_radar_render(radar_common, radar_opt);
    if (*dwa) return cmd_dwa_demo(dwa_common, dwa_opt);
    if (*pcg) return cmd_pcg_preview(pcg_common, pcg_opt);
    if (*serve) return cmd_serve(serve_common, serve_opt);
  } catch (const asv::Error& e) {
    spdlog::error("{}: {}", e.code(), e.what());
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("io: {}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("internal: {}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
