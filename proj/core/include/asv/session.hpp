// One simulated vessel behind the RPC service. A Session is owned by a single
// authority thread; other threads only see the immutable snapshots it publishes.
#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asv/radar.hpp"
#include "asv/rl_env.hpp"
#include "asv/scenario.hpp"
#include "asv/world.hpp"

namespace asv {

using Json = nlohmann::json;

inline constexpr const char* kProtocolName = "asvsim-rpc";
inline constexpr int kProtocolVersion = 1;

/// Thrown for requests that are valid but not allowed in the current mode.
class ModeViolation : public RuntimeFailure {
 public:
  explicit ModeViolation(const std::string& what) : RuntimeFailure("mode-violation", what) {}
};

struct SessionConfig {
  VesselParams vessel;
  ObstacleWorld world;
  EnvConfig env;
  RadarSensorSpec radar{RadarConfig{}, 720, 5000.0};
  double dt = kDefaultDt;
  bool lockstep = true;
};

/// Builds a session configuration from a scenario (its RL settings if it has an
/// rl controller, defaults otherwise).
SessionConfig session_config_from(const ScenarioDoc& doc, bool lockstep);

/// Read-only view published after every mutation.
struct Snapshot {
  SimState state;
  ControlCommand command;
  std::shared_ptr<const ObstacleWorld> world;
  VesselParams vessel;
  RadarSensorSpec radar;
  std::vector<EpisodeStats> episodes;
  bool lockstep = true;
  bool episode_active = false;
};

class Session {
 public:
  explicit Session(SessionConfig config);

  /// Handles a mutating method. Throws asv::Error subclasses for in-band errors
  /// and std::out_of_range for unknown methods.
  Json call(const std::string& method, const Json& params);
  /// One fixed integration step of the free-running vessel (realtime clock).
  void tick();

  std::shared_ptr<const Snapshot> snapshot() const;
  Json handshake() const;
  bool lockstep() const { return config_.lockstep; }
  double dt() const { return config_.dt; }

  static bool is_query(const std::string& method);
  static bool is_mutation(const std::string& method);
  /// Answers get_state / get_scan / get_radar / get_episode_stats from a snapshot.
  static Json query(const Snapshot& snap, const std::string& method, const Json& params);

 private:
  void publish();
  void rebuild_env();

  SessionConfig config_;
  std::shared_ptr<const ObstacleWorld> world_;
  SimState state_;
  ControlCommand command_;
  RlEnvironment env_;
  std::vector<EpisodeStats> episodes_;
  double episode_reward_ = 0.0;
  int successes_ = 0;

  mutable std::mutex snap_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace asv
