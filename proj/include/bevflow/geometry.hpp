#pragma once

#include <cmath>
#include <vector>

namespace bevflow {

inline constexpr double kPi = 3.14159265358979323846;

/// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// 2D rigid pose: position in meters, yaw in radians ((-pi, pi], x-forward,
/// y-left, counterclockwise positive).
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

/// Express a world point in the coordinate frame of `frame`.
Vec2 to_frame(Vec2 world, const Pose2D& frame);

/// Express a frame-local point in world coordinates.
Vec2 from_frame(Vec2 local, const Pose2D& frame);

/// Re-express a point given in `from` coordinates in `to` coordinates.
Vec2 rigid_transform(Vec2 p, const Pose2D& from, const Pose2D& to);

std::vector<Vec2> rigid_transform(const std::vector<Vec2>& pts,
                                  const Pose2D& from, const Pose2D& to);

}  // namespace bevflow
