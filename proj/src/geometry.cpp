#include "bevflow/geometry.hpp"

namespace bevflow {

double normalize_angle(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r <= -kPi)
    r += 2.0 * kPi;
  else if (r > kPi)
    r -= 2.0 * kPi;
  return r;
}

Vec2 to_frame(Vec2 world, const Pose2D& frame) {
  const double dx = world.x - frame.x;
  const double dy = world.y - frame.y;
  const double c = std::cos(frame.yaw);
  const double s = std::sin(frame.yaw);
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 from_frame(Vec2 local, const Pose2D& frame) {
  const double c = std::cos(frame.yaw);
  const double s = std::sin(frame.yaw);
  return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y};
}

Vec2 rigid_transform(Vec2 p, const Pose2D& from, const Pose2D& to) {
  return to_frame(from_frame(p, from), to);
}

std::vector<Vec2> rigid_transform(const std::vector<Vec2>& pts, const Pose2D& from,
                                  const Pose2D& to) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) out.push_back(rigid_transform(p, from, to));
  return out;
}

}  // namespace bevflow
