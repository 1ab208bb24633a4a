#include "sbsos/pose2.hpp"

namespace sbsos {

Pose2 compose(const Pose2& a, const Pose2& b) {
  Pose2 r;
  r.c = a.c * b.c - a.s * b.s;
  r.s = a.s * b.c + a.c * b.s;
  r.x = a.x + a.c * b.x - a.s * b.y;
  r.y = a.y + a.s * b.x + a.c * b.y;
  return r.normalized();
}

Pose2 inverse(const Pose2& p) {
  Pose2 r;
  r.c = p.c;
  r.s = -p.s;
  r.x = -(p.c * p.x + p.s * p.y);
  r.y = -(p.c * p.y - p.s * p.x);
  return r.normalized();
}

Pose2 relative(const Pose2& a, const Pose2& b) { return compose(inverse(a), b); }

Landmark2 to_local(const Pose2& p, const Landmark2& world) {
  const double dx = world.x - p.x;
  const double dy = world.y - p.y;
  return {p.c * dx + p.s * dy, -p.s * dx + p.c * dy};
}

Landmark2 to_world(const Pose2& p, const Landmark2& local) {
  return {p.x + p.c * local.x - p.s * local.y,
          p.y + p.s * local.x + p.c * local.y};
}

}  // namespace sbsos
