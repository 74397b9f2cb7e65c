#include "asv/radar.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace asv {

void RadarConfig::validate() const {
  if (image_size < 2) throw ValidationError("radar: image_size must be >= 2");
  if (!(alpha > 0.0 && alpha < kPi)) throw ValidationError("radar: alpha must lie in (0, pi)");
  if (!(beta > 0.0 && beta < kPi)) throw ValidationError("radar: beta must lie in (0, pi)");
  if (!(max_range > 0.0) || !std::isfinite(max_range)) {
    throw ValidationError("radar: max_range must be > 0");
  }
  if (!(rotation_rpm > 0.0)) throw ValidationError("radar: rotation_rpm must be > 0");
}

namespace {

int floor_scale(double value, double min, double span, int g) {
  const double scaled = std::floor((value - min) / span * static_cast<double>(g));
  return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(g - 1)));
}

}  // namespace

PixelCoord to_pixel(Vec2 p, const RasterExtent& e, int g) {
  return {floor_scale(p.x, e.min.x, e.span.x, g), floor_scale(p.y, e.min.y, e.span.y, g)};
}

NormalizedPoints normalize_points(std::span<const Vec2> points, int g, ExtentMode mode,
                                  Vec2 radar_position, double max_range) {
  if (g < 2) throw ValidationError("radar: image_size must be >= 2");
  NormalizedPoints out;
  if (mode == ExtentMode::paper_normalized) {
    if (points.empty()) throw EmptyInputError("radar: no points to normalize");
    Vec2 lo = points.front();
    Vec2 hi = points.front();
    for (const auto& p : points) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    auto floor_axis = [](double& min, double max, double& span) {
      span = max - min;
      if (span < kMinExtent) {
        min = 0.5 * (min + max) - 0.5 * kMinExtent;
        span = kMinExtent;
      }
    };
    Vec2 span;
    floor_axis(lo.x, hi.x, span.x);
    floor_axis(lo.y, hi.y, span.y);
    out.extent = {lo, span};
    out.pixels.reserve(points.size());
    for (const auto& p : points) out.pixels.push_back(to_pixel(p, out.extent, g));
    return out;
  }

  if (!(max_range > 0.0)) throw ValidationError("radar: fixed-metric mode needs max_range > 0");
  out.extent = {{radar_position.x - max_range, radar_position.y - max_range},
                {2.0 * max_range, 2.0 * max_range}};
  for (const auto& p : points) {
    if (std::abs(p.x - radar_position.x) > max_range || std::abs(p.y - radar_position.y) > max_range) {
      continue;
    }
    out.pixels.push_back(to_pixel(p, out.extent, g));
  }
  return out;
}

PointGeometry point_geometry(PixelCoord p, PixelCoord radar) {
  PointGeometry geo;
  geo.dx = static_cast<double>(p.x - radar.x);
  geo.dy = static_cast<double>(p.y - radar.y);
  geo.range = std::hypot(geo.dx, geo.dy);
  geo.theta = geo.range == 0.0 ? 0.0 : std::atan2(geo.dy, geo.dx);
  return geo;
}

PsfAxes psf_axes(double range, double alpha, double beta, Vec2 span, int g) {
  const double gd = static_cast<double>(g);
  return {range * std::tan(alpha / 2.0) * gd / span.x, range * std::tan(beta / 2.0) * gd / span.y};
}

std::size_t RadarFrame::count_set() const {
  return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), std::uint8_t{1}));
}

Vec2 RadarFrame::pixel_center(int x, int y) const {
  const double g = static_cast<double>(size);
  return {extent.min.x + (static_cast<double>(x) + 0.5) * extent.span.x / g,
          extent.min.y + (static_cast<double>(y) + 0.5) * extent.span.y / g};
}

RadarFrame rasterize(std::span<const Vec2> points, const RadarConfig& config, Vec2 radar_position,
                     double timestamp) {
  config.validate();
  const int g = config.image_size;
  RadarFrame frame;
  frame.size = g;
  frame.timestamp = timestamp;
  frame.pixels.assign(static_cast<std::size_t>(g) * static_cast<std::size_t>(g), 0);

  if (config.extent_mode == ExtentMode::fixed_metric) {
    frame.extent = {{radar_position.x - config.max_range, radar_position.y - config.max_range},
                    {2.0 * config.max_range, 2.0 * config.max_range}};
    frame.radar_pixel = {g / 2, g / 2};
  }
  if (points.empty() && config.extent_mode == ExtentMode::fixed_metric) return frame;

  const NormalizedPoints norm =
      normalize_points(points, g, config.extent_mode, radar_position, config.max_range);
  frame.extent = norm.extent;
  if (config.extent_mode == ExtentMode::paper_normalized) {
    frame.radar_pixel = to_pixel(radar_position, norm.extent, g);
  }

  auto set = [&](int x, int y) { frame.pixels[static_cast<std::size_t>(y * g + x)] = 1; };

  for (const auto& p : norm.pixels) {
    set(p.x, p.y);  // degenerate-ellipse guard: the detection itself always shows
    const PointGeometry geo = point_geometry(p, frame.radar_pixel);
    const PsfAxes ax = psf_axes(geo.range, config.alpha, config.beta, norm.extent.span, g);
    if (ax.a < 0.5 || ax.b < 0.5) continue;

    const double c = std::cos(geo.theta);
    const double s = std::sin(geo.theta);
    const double a2 = ax.a * ax.a;
    const double b2 = ax.b * ax.b;
    // Half-widths of the rotated ellipse's bounding box, padded by one pixel.
    const double hx = std::sqrt(a2 * c * c + b2 * s * s) + 1.0;
    const double hy = std::sqrt(a2 * s * s + b2 * c * c) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(p.x - hx)));
    const int x1 = std::min(g - 1, static_cast<int>(std::ceil(p.x + hx)));
    const int y0 = std::max(0, static_cast<int>(std::floor(p.y - hy)));
    const int y1 = std::min(g - 1, static_cast<int>(std::ceil(p.y + hy)));
    for (int y = y0; y <= y1; ++y) {
      const double yc = static_cast<double>(y - p.y);
      for (int x = x0; x <= x1; ++x) {
        const double xc = static_cast<double>(x - p.x);
        const double xr = xc * c + yc * s;
        const double yr = -xc * s + yc * c;
        if (xr * xr / a2 + yr * yr / b2 <= 1.0) set(x, y);
      }
    }
  }
  return frame;
}

}  // namespace asv
