#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "asv/common.hpp"

namespace asvsim {

namespace fs = std::filesystem;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitGoalNotReached = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitBind = 5;
inline constexpr int kExitUsage = 64;

class IoFailure : public asv::RuntimeFailure {
 public:
  explicit IoFailure(const std::string& what) : RuntimeFailure("io", what) {}
};

struct CommonOptions {
  std::optional<fs::path> scenario;
  std::optional<std::uint64_t> seed;
  fs::path out = ".";
  std::optional<double> dt;
};

int cmd_run(const CommonOptions& opt);

struct PidDemoOptions {
  double target = 0.51;
  double kp = 1.5;
  double ki = 1.0;
  double kd = 0.2;
  double duration = 60.0;
  std::optional<fs::path> vessel;
};
int cmd_pid_demo(const CommonOptions& opt, const PidDemoOptions& pid);

struct RadarRenderOptions {
  std::optional<fs::path> points;  // CSV with x,y columns
  double origin_x = 0.0;
  double origin_y = 0.0;
  int image_size = 512;
  double alpha = 1.0;
  double beta = 0.593;
  double max_range = 5000.0;
  std::string mode = "fixed_metric";
  bool png = true;
};
int cmd_radar_render(const CommonOptions& opt, const RadarRenderOptions& radar);

struct DwaDemoOptions {
  std::optional<double> goal_x;
  std::optional<double> goal_y;
  bool candidates = true;
};
int cmd_dwa_demo(const CommonOptions& opt, const DwaDemoOptions& dwa);

struct PcgPreviewOptions {
  int n_segments = 5;
  double width_min = 30.0;
  double width_max = 45.0;
  double angle_max = 0.35;
  double length_min = 50.0;
  double length_max = 80.0;
};
int cmd_pcg_preview(const CommonOptions& opt, const PcgPreviewOptions& pcg);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 7878;
  bool realtime = false;
  double realtime_factor = 1.0;
};
int cmd_serve(const CommonOptions& opt, const ServeOptions& serve);

/// Directory with the bundled vessel and scenario documents.
fs::path data_dir();

}  // namespace asvsim
