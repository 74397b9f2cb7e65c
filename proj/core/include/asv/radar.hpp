// Marine radar emulation: detections from a point cloud are rasterized into a
// binary PPI image, each one painted as an ellipse whose axes grow with range
// and whose major axis points radially away from the radar.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asv/common.hpp"

namespace asv {

enum class ExtentMode {
  /// Image spans the bounding box of the points (floor-scaled mapping).
  paper_normalized,
  /// Image spans a radar-centered square of side 2 * max_range.
  fixed_metric,
};

struct RadarConfig {
  int image_size = 512;     // G
  double alpha = 1.0;       // horizontal beam width [rad]
  double beta = 0.593;      // range-resolution scalar [rad]
  double max_range = 5000.0;
  double rotation_rpm = 36.0;
  ExtentMode extent_mode = ExtentMode::fixed_metric;

  void validate() const;
  /// Seconds between consecutive frames (one frame per antenna revolution).
  double frame_period() const { return 60.0 / rotation_rpm; }
};

/// Metric bounds of a raster: pixel (i, j) covers
/// [min.x + i * span.x / G, min.x + (i + 1) * span.x / G) and likewise in y.
struct RasterExtent {
  Vec2 min;
  Vec2 span;  // Delta p
};

struct PixelCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct NormalizedPoints {
  std::vector<PixelCoord> pixels;
  RasterExtent extent;
};

/// Maps points to pixel coordinates. In paper_normalized mode the extent is the
/// points' bounding box (each axis floored to kMinExtent meters); in fixed_metric
/// mode it is the square of side 2 * max_range centered on `radar_position`, and
/// points outside it are dropped. Throws EmptyInputError for an empty point set
/// in paper_normalized mode.
NormalizedPoints normalize_points(std::span<const Vec2> points, int image_size, ExtentMode mode,
                                  Vec2 radar_position = {}, double max_range = 0.0);

inline constexpr double kMinExtent = 1.0;

/// Pixel of a metric position under an extent (clamped into the raster).
PixelCoord to_pixel(Vec2 p, const RasterExtent& extent, int image_size);

struct PointGeometry {
  double dx = 0.0;
  double dy = 0.0;
  double range = 0.0;
  double theta = 0.0;  // 0 when the point coincides with the radar
};

PointGeometry point_geometry(PixelCoord p, PixelCoord radar);

struct PsfAxes {
  double a = 0.0;  // along the radial direction
  double b = 0.0;  // across it
};

PsfAxes psf_axes(double range, double alpha, double beta, Vec2 extent_span, int image_size);

struct RadarFrame {
  int size = 0;
  std::vector<std::uint8_t> pixels;  // row-major, pixels[y * size + x], values 0/1
  RasterExtent extent;
  PixelCoord radar_pixel;
  double timestamp = 0.0;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y * size + x)]; }
  std::size_t count_set() const;
  /// Metric position of a pixel's center.
  Vec2 pixel_center(int x, int y) const;
};

/// Paints every detection's ellipse and returns the union. radar_position is the
/// sensor location in the same metric frame as the points.
RadarFrame rasterize(std::span<const Vec2> points, const RadarConfig& config, Vec2 radar_position,
                     double timestamp = 0.0);

}  // namespace asv
