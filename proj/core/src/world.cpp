#include "asv/world.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace asv {

namespace {

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return {v.x / n, v.y / n};
}

Vec2 left_normal(Vec2 d) { return {-d.y, d.x}; }

void validate_obstacle(const Obstacle& o, std::size_t index) {
  const std::size_t need = o.closed ? 3 : 2;
  if (o.vertices.size() < need) {
    throw ValidationError(fmt::format("obstacle {}: needs at least {} vertices", index, need));
  }
  for (const auto& v : o.vertices) {
    if (!finite(v)) throw ValidationError(fmt::format("obstacle {}: non-finite vertex", index));
  }
  if (!o.closed) return;
  const std::size_t n = o.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Segment ei{o.vertices[i], o.vertices[(i + 1) % n]};
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      const Segment ej{o.vertices[j], o.vertices[(j + 1) % n]};
      if (segments_intersect(ei, ej)) {
        throw ValidationError(
            fmt::format("obstacle {}: polygon is self-intersecting (edges {} and {})", index, i, j));
      }
    }
  }
}

}  // namespace

ObstacleWorld::ObstacleWorld(std::vector<Obstacle> obstacles, Vec2 goal, Pose spawn,
                             CurrentSpec current, WindForce wind,
                             std::optional<ChannelGeometry> channel)
    : obstacles_(std::move(obstacles)),
      goal_(goal),
      spawn_{spawn.x, spawn.y, wrap_angle(spawn.psi)},
      current_(current),
      wind_(wind),
      channel_(std::move(channel)) {
  if (!finite(goal_) || !finite(spawn_.position()) || !std::isfinite(spawn_.psi)) {
    throw ValidationError("world goal and spawn must be finite");
  }
  if (!wind_.tau.allFinite()) throw ValidationError("wind force must be finite");
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const auto& o = obstacles_[i];
    validate_obstacle(o, i);
    const std::size_t n = o.vertices.size();
    for (std::size_t k = 0; k + 1 < n; ++k) segments_.push_back({o.vertices[k], o.vertices[k + 1]});
    if (o.closed) segments_.push_back({o.vertices[n - 1], o.vertices[0]});
  }
}

ObstacleWorld ObstacleWorld::with_obstacles(const std::vector<Obstacle>& extra) const {
  auto all = obstacles_;
  all.insert(all.end(), extra.begin(), extra.end());
  return ObstacleWorld(std::move(all), goal_, spawn_, current_, wind_, channel_);
}

ObstacleWorld ObstacleWorld::with_goal(Vec2 goal) const {
  return ObstacleWorld(obstacles_, goal, spawn_, current_, wind_, channel_);
}

ObstacleWorld ObstacleWorld::with_environment(const CurrentSpec& current,
                                              const WindForce& wind) const {
  return ObstacleWorld(obstacles_, goal_, spawn_, current, wind, channel_);
}

void PcgParams::validate() const {
  if (n_segments < 1) throw ValidationError("pcg: n_segments must be >= 1");
  if (!(width_min > 0.0) || !(width_min <= width_max) || !std::isfinite(width_max)) {
    throw ValidationError("pcg: width range must satisfy 0 < width_min <= width_max");
  }
  if (!(angle_max >= 0.0) || !(angle_max < kPi / 2.0)) {
    throw ValidationError("pcg: angle_max must lie in [0, pi/2)");
  }
  if (!(length_min > 0.0) || !(length_min <= length_max) || !std::isfinite(length_max)) {
    throw ValidationError("pcg: segment length range must satisfy 0 < length_min <= length_max");
  }
  // The inner bank of a turn is pulled back by (w/2) tan(turn/2) at each end of
  // a segment; shorter segments would fold the inner bank over itself.
  const double fold = width_max * std::tan(angle_max / 2.0);
  if (!(length_min > fold)) {
    throw ValidationError(fmt::format(
        "pcg: length_min must exceed width_max * tan(angle_max / 2) = {} to keep banks simple", fold));
  }
}

ObstacleWorld generate_channel(const PcgParams& params) {
  params.validate();
  Rng rng(params.seed);
  const auto n = static_cast<std::size_t>(params.n_segments);

  std::vector<double> widths(n);
  std::vector<double> headings(n);
  std::vector<double> lengths(n);
  double heading = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    widths[i] = rng.uniform(params.width_min, params.width_max);
    const double turn = rng.uniform(-params.angle_max, params.angle_max);
    lengths[i] = rng.uniform(params.length_min, params.length_max);
    if (i > 0) {
      // Reflect turns that would leave [-angle_max, angle_max]; the channel
      // then always advances along +x and cannot cross itself.
      double next = heading + turn;
      if (std::abs(next) > params.angle_max) next = heading - turn;
      heading = next;
    }
    headings[i] = heading;
  }

  ChannelGeometry ch;
  ch.centerline.push_back({0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d{std::cos(headings[i]), std::sin(headings[i])};
    ch.centerline.push_back(ch.centerline.back() + lengths[i] * d);
  }
  ch.joint_widths.push_back(widths[0]);
  for (std::size_t i = 0; i < n; ++i) ch.joint_widths.push_back(widths[i]);

  for (std::size_t j = 0; j <= n; ++j) {
    const Vec2 d_in = unit(ch.centerline[j == 0 ? 1 : j] - ch.centerline[j == 0 ? 0 : j - 1]);
    const Vec2 d_out = unit(ch.centerline[j == n ? n : j + 1] - ch.centerline[j == n ? n - 1 : j]);
    const Vec2 tangent = unit(d_in + d_out);
    // Miter: perpendicular distance w/2 from both adjacent segment lines.
    const double offset = 0.5 * ch.joint_widths[j] / dot(tangent, d_out);
    const Vec2 nrm = left_normal(tangent);
    ch.left_bank.push_back(ch.centerline[j] + offset * nrm);
    ch.right_bank.push_back(ch.centerline[j] - offset * nrm);
  }
  for (std::size_t i = 0; i < n; ++i) {
    ch.sections.push_back({ch.left_bank[i], ch.left_bank[i + 1], ch.right_bank[i + 1], ch.right_bank[i]});
  }

  std::vector<Obstacle> obstacles{{ch.left_bank, false}, {ch.right_bank, false}};
  const Pose spawn{0.0, 0.0, headings[0]};
  const Vec2 goal = ch.centerline.back();
  return ObstacleWorld(std::move(obstacles), goal, spawn, {}, {}, std::move(ch));
}

Obstacle place_moored(const ChannelGeometry& channel, const MooredVessel& spec) {
  const auto n_seg = static_cast<int>(channel.sections.size());
  if (spec.segment < 0 || spec.segment >= n_seg) {
    throw ValidationError(fmt::format("moored vessel: segment {} out of range [0, {})", spec.segment, n_seg));
  }
  if (!(spec.length > 0.0) || !(spec.beam > 0.0)) {
    throw ValidationError("moored vessel: length and beam must be > 0");
  }
  const auto i = static_cast<std::size_t>(spec.segment);
  const auto& bank = spec.side == BankSide::left ? channel.left_bank : channel.right_bank;
  const Vec2 a = bank[i];
  const Vec2 b = bank[i + 1];
  const double bank_len = norm(b - a);
  if (spec.length >= bank_len) {
    throw ValidationError("moored vessel: hull longer than the bank segment it is placed on");
  }
  const Vec2 u = unit(b - a);
  const Vec2 inward = spec.side == BankSide::left ? Vec2{u.y, -u.x} : left_normal(u);
  const double half = 0.5 * spec.length;
  const double s = std::clamp(spec.fraction * bank_len, half, bank_len - half);
  const Vec2 c = a + s * u;
  return Obstacle{{c - half * u, c + half * u, c + half * u + spec.beam * inward,
                   c - half * u + spec.beam * inward},
                  true};
}

Obstacle rectangle(Vec2 center, double length, double width, double heading) {
  const Vec2 u{std::cos(heading), std::sin(heading)};
  const Vec2 w = left_normal(u);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return Obstacle{{center - hl * u - hw * w, center + hl * u - hw * w, center + hl * u + hw * w,
                   center - hl * u + hw * w},
                  true};
}

std::vector<Vec2> ScanFrame::hits() const {
  std::vector<Vec2> out;
  for (const auto& p : points) {
    if (p) out.push_back(*p);
  }
  return out;
}

double ScanFrame::beam_azimuth(std::size_t i) const {
  return kTwoPi * static_cast<double>(i) / static_cast<double>(ranges.size());
}

double point_segment_distance(Vec2 p, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double len2 = dot(e, e);
  double t = len2 > 0.0 ? dot(p - s.a, e) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (s.a + t * e));
}

std::optional<double> ray_segment_hit(Vec2 origin, Vec2 dir, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double denom = cross(dir, e);
  if (denom == 0.0) return std::nullopt;  // parallel; endpoints are covered by neighbours
  const Vec2 ao = s.a - origin;
  const double t = cross(ao, e) / denom;
  const double u = cross(ao, dir) / denom;
  if (t > 0.0 && u >= 0.0 && u <= 1.0) return t;
  return std::nullopt;
}

bool segments_intersect(const Segment& s1, const Segment& s2) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
  };
  const int o1 = orient(s1.a, s1.b, s2.a);
  const int o2 = orient(s1.a, s1.b, s2.b);
  const int o3 = orient(s2.a, s2.b, s1.a);
  const int o4 = orient(s2.a, s2.b, s1.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s1.a, s1.b, s2.a)) return true;
  if (o2 == 0 && on_segment(s1.a, s1.b, s2.b)) return true;
  if (o3 == 0 && on_segment(s2.a, s2.b, s1.a)) return true;
  if (o4 == 0 && on_segment(s2.a, s2.b, s1.b)) return true;
  return false;
}

ScanFrame raycast_scan(const ObstacleWorld& world, const Pose& pose, int n_beams, double max_range,
                       double timestamp) {
  if (n_beams < 1) throw ValidationError("raycast: n_beams must be >= 1");
  if (!(max_range > 0.0)) throw ValidationError("raycast: max_range must be > 0");

  ScanFrame scan;
  scan.origin = pose;
  scan.max_range = max_range;
  scan.timestamp = timestamp;
  scan.ranges.assign(static_cast<std::size_t>(n_beams), max_range);
  scan.points.assign(static_cast<std::size_t>(n_beams), std::nullopt);

  const Vec2 o = pose.position();
  const auto& segs = world.segments();
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double az = pose.psi + scan.beam_azimuth(i);
    const Vec2 dir{std::cos(az), std::sin(az)};
    double best = max_range;
    for (const auto& s : segs) {
      if (const auto t = ray_segment_hit(o, dir, s); t && *t < best) best = *t;
    }
    scan.ranges[i] = best;
    if (best < max_range) scan.points[i] = o + best * dir;
  }
  return scan;
}

ScanFrame subsample(const ScanFrame& scan, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) {
    throw ValidationError("subsample: keep_fraction must lie in [0, 1]");
  }
  ScanFrame out = scan;
  Rng rng(seed);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (!out.points[i]) continue;
    if (!(rng.uniform01() < keep_fraction)) {
      out.points[i].reset();
      out.ranges[i] = out.max_range;
    }
  }
  return out;
}

bool collision_check(const ObstacleWorld& world, const Pose& pose, double footprint_radius) {
  if (!(footprint_radius > 0.0)) throw ValidationError("collision_check: footprint_radius must be > 0");
  const Vec2 p = pose.position();
  for (const auto& s : world.segments()) {
    if (point_segment_distance(p, s) <= footprint_radius) return true;
  }
  return false;
}

}  // namespace asv
