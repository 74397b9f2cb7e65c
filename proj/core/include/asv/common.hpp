#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace asv {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

/// Shortest signed difference `to - from`, wrapped into (-pi, pi].
inline double angle_diff(double to, double from) { return wrap_angle(to - from); }

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Error hierarchy. Every error carries a stable machine-readable code that the
// CLI maps to exit codes and the RPC layer maps to wire error codes.

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Invalid user input: documents, parameters, command shapes.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string code = "validation")
      : Error(std::move(code), what) {}
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& what) : ValidationError(what, "parse-error") {}
};

class ConfigError : public ValidationError {
 public:
  explicit ConfigError(const std::string& what) : ValidationError(what, "config-error") {}
};

class AsymmetricMassError : public ValidationError {
 public:
  explicit AsymmetricMassError(const std::string& what)
      : ValidationError(what, "mass-not-symmetric") {}
};

class NonSpdMassError : public ValidationError {
 public:
  explicit NonSpdMassError(const std::string& what)
      : ValidationError(what, "mass-not-positive-definite") {}
};

class ThrusterBoundsError : public ValidationError {
 public:
  explicit ThrusterBoundsError(const std::string& what)
      : ValidationError(what, "thruster-bounds") {}
};

/// Failures that happen while running a valid configuration.
class RuntimeFailure : public Error {
 public:
  RuntimeFailure(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

class IntegrationDiverged : public RuntimeFailure {
 public:
  IntegrationDiverged(std::string component, const std::string& what)
      : RuntimeFailure("integration-diverged", what), component_(std::move(component)) {}
  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

class EmptyInputError : public ValidationError {
 public:
  explicit EmptyInputError(const std::string& what) : ValidationError(what, "empty-input") {}
};

class NoFeasibleTrajectory : public RuntimeFailure {
 public:
  explicit NoFeasibleTrajectory(const std::string& what)
      : RuntimeFailure("no-feasible-trajectory", what) {}
};

class EpisodeFinished : public RuntimeFailure {
 public:
  explicit EpisodeFinished(const std::string& what) : RuntimeFailure("episode-finished", what) {}
};

class Unconfigured : public RuntimeFailure {
 public:
  explicit Unconfigured(const std::string& what) : RuntimeFailure("unconfigured", what) {}
};

}  // namespace asv
