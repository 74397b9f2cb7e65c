#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "asv/common.hpp"
#include "asv/dynamics.hpp"

namespace asv {

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Closed polygon or open polyline in earth-frame meters.
struct Obstacle {
  std::vector<Vec2> vertices;
  bool closed = false;
};

/// Centerline and section outlines of a generated channel.
struct ChannelGeometry {
  std::vector<Vec2> centerline;      // n_segments + 1 joints
  std::vector<double> joint_widths;  // bank-to-bank width at each joint
  std::vector<Vec2> left_bank;
  std::vector<Vec2> right_bank;
  /// One quad per segment: left_i, left_{i+1}, right_{i+1}, right_i.
  std::vector<std::array<Vec2, 4>> sections;
};

/// Immutable scene. Construction validates every obstacle and caches the
/// flattened segment list used by the sensing and collision queries.
class ObstacleWorld {
 public:
  ObstacleWorld() = default;
  ObstacleWorld(std::vector<Obstacle> obstacles, Vec2 goal, Pose spawn, CurrentSpec current = {},
                WindForce wind = {}, std::optional<ChannelGeometry> channel = std::nullopt);

  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  const std::vector<Segment>& segments() const { return segments_; }
  Vec2 goal() const { return goal_; }
  const Pose& spawn() const { return spawn_; }
  const CurrentSpec& current() const { return current_; }
  const WindForce& wind() const { return wind_; }
  const std::optional<ChannelGeometry>& channel() const { return channel_; }

  /// Copy with additional obstacles (e.g. moored vessels placed on a channel).
  ObstacleWorld with_obstacles(const std::vector<Obstacle>& extra) const;
  ObstacleWorld with_goal(Vec2 goal) const;
  ObstacleWorld with_environment(const CurrentSpec& current, const WindForce& wind) const;

 private:
  std::vector<Obstacle> obstacles_;
  std::vector<Segment> segments_;
  Vec2 goal_;
  Pose spawn_;
  CurrentSpec current_;
  WindForce wind_;
  std::optional<ChannelGeometry> channel_;
};

/// Procedural channel parameters. Every segment draws a width, a turn angle
/// and a length from the given ranges, in that order.
struct PcgParams {
  int n_segments = 5;
  std::uint64_t seed = 1;
  double width_min = 30.0;
  double width_max = 45.0;
  double angle_max = 0.35;  // turns are drawn from [-angle_max, angle_max]
  double length_min = 50.0;
  double length_max = 80.0;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

ObstacleWorld generate_channel(const PcgParams& params);

enum class BankSide { left, right };

/// A rectangular moored vessel placed flush against a channel bank.
struct MooredVessel {
  int segment = 0;
  BankSide side = BankSide::left;
  double fraction = 0.5;  // position of the hull center along the segment's bank
  double length = 10.0;
  double beam = 3.0;
};

Obstacle place_moored(const ChannelGeometry& channel, const MooredVessel& spec);

/// Axis-free rectangle helper for hand-written scenarios.
Obstacle rectangle(Vec2 center, double length, double width, double heading);

struct ScanFrame {
  Pose origin;
  double max_range = 0.0;
  std::vector<double> ranges;               // (0, max_range]
  std::vector<std::optional<Vec2>> points;  // present iff ranges[i] < max_range
  double timestamp = 0.0;

  std::vector<Vec2> hits() const;
  double beam_azimuth(std::size_t i) const;  // sensor frame, [0, 2pi)
};

/// Planar 360 degree range scan: n_beams uniformly spaced rays from pose.
ScanFrame raycast_scan(const ObstacleWorld& world, const Pose& pose, int n_beams, double max_range,
                       double timestamp = 0.0);

/// Keeps each hit independently with probability keep_fraction.
ScanFrame subsample(const ScanFrame& scan, double keep_fraction, std::uint64_t seed);

/// True iff the disc of radius footprint_radius at the pose touches an obstacle segment.
bool collision_check(const ObstacleWorld& world, const Pose& pose, double footprint_radius);

// Geometry helpers shared with the planner and tests.
double point_segment_distance(Vec2 p, const Segment& s);
/// Distance along the unit ray (origin, dir) to segment s, if it is hit at t > 0.
std::optional<double> ray_segment_hit(Vec2 origin, Vec2 dir, const Segment& s);
bool segments_intersect(const Segment& s1, const Segment& s2);

/// Portable uniform draws on top of std::mt19937_64, whose output sequence is
/// fixed by the standard. std distributions are implementation-defined, so
/// doubles are formed from the top 53 bits directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace asv
