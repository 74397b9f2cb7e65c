// Scenario documents: vessel reference, world (inline, file or procedural),
// environment schedule, one controller and run settings. YAML, SI units.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "asv/control.hpp"
#include "asv/dynamics.hpp"
#include "asv/navigation.hpp"
#include "asv/radar.hpp"
#include "asv/rl_env.hpp"
#include "asv/trajectory.hpp"
#include "asv/world.hpp"

namespace asv {

/// Piecewise-constant current and wind; phase i holds from t_start until the next phase.
struct EnvironmentPhase {
  double t_start = 0.0;
  CurrentSpec current;
  WindForce wind;
};

class EnvironmentSchedule {
 public:
  EnvironmentSchedule() : phases_{EnvironmentPhase{}} {}
  explicit EnvironmentSchedule(std::vector<EnvironmentPhase> phases);

  Environment at(double t) const;
  const std::vector<EnvironmentPhase>& phases() const { return phases_; }
  /// Copy with the current speed replaced in every phase (headings kept).
  EnvironmentSchedule with_current_speed(double speed) const;

 private:
  std::vector<EnvironmentPhase> phases_;
};

struct OpenLoopStep {
  double t = 0.0;
  double thrust = 0.0;
  double angle = 0.5;
};

struct OpenLoopController {
  std::vector<OpenLoopStep> script;  // sorted by t, first entry at t = 0
};

struct PidController {
  PidDemoConfig config;
};

struct DwaController {
  NavigatorConfig config;
};

struct RlController {
  EnvConfig env;
  std::string policy = "scripted";  // scripted | random
  ScriptedPolicyGains gains;
  int episodes = 1;
};

using ControllerSpec = std::variant<OpenLoopController, PidController, DwaController, RlController>;
const char* controller_name(const ControllerSpec& c);

struct RadarSensorSpec {
  RadarConfig config;
  int n_beams = 720;
  double sensor_range = 5000.0;
};

struct ScenarioDoc {
  std::string name;
  std::filesystem::path vessel_path;
  VesselParams vessel;
  ObstacleWorld world;
  std::optional<PcgParams> pcg;
  std::vector<MooredVessel> moored;
  EnvironmentSchedule schedule;
  std::vector<double> current_sweep;  // optional list of current speeds to run
  double dt = kDefaultDt;
  double duration = 60.0;
  std::uint64_t seed = 0;
  ControllerSpec controller;
  RadarSensorSpec radar;
};

/// Parses a scenario. Relative file references resolve against base_dir.
/// Errors carry "source:line" diagnostics.
ScenarioDoc load_scenario(const std::string& document, const std::string& source,
                          const std::filesystem::path& base_dir);
ScenarioDoc load_scenario_file(const std::filesystem::path& path);

/// World document: obstacles, goal, spawn and optionally a constant environment.
ObstacleWorld load_world(const std::string& document, const std::string& source = "<memory>");
ObstacleWorld load_world_file(const std::filesystem::path& path);

/// Rebuilds the procedural world for another seed, re-placing moored vessels.
ObstacleWorld build_pcg_world(const PcgParams& params, const std::vector<MooredVessel>& moored);

/// Open-loop or PID run of the scenario's vessel under its environment
/// schedule, one row per integration step (open loop) or control tick (PID).
std::vector<TrajectoryRow> simulate(const ScenarioDoc& doc, const EnvironmentSchedule& schedule);

}  // namespace asv
