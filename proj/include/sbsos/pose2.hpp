#pragma once

#include <cmath>

namespace sbsos {

/// Planar rigid pose stored as (cos, sin, x, y) so the rotation entries match
/// the optimization variables one-to-one. Angle conversions happen only at
/// the I/O and baseline-solver boundaries.
struct Pose2 {
  double c = 1.0;
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;

  static Pose2 identity() { return {}; }

  static Pose2 from_angle(double theta, double tx = 0.0, double ty = 0.0) {
    return {std::cos(theta), std::sin(theta), tx, ty};
  }

  double angle() const { return std::atan2(s, c); }

  /// Scales (c, s) back onto the unit circle after floating-point drift.
  Pose2 normalized() const {
    const double r = std::hypot(c, s);
    return {c / r, s / r, x, y};
  }

  bool is_normalized(double tol = 1e-9) const {
    return std::abs(c * c + s * s - 1.0) <= tol;
  }
};

struct Landmark2 {
  double x = 0.0;
  double y = 0.0;
};

/// Group action a*b (apply b in a's frame). Result is renormalized.
Pose2 compose(const Pose2& a, const Pose2& b);

Pose2 inverse(const Pose2& p);

/// Relative pose r with compose(a, r) == b.
Pose2 relative(const Pose2& a, const Pose2& b);

/// Landmark position expressed in the frame of `p`.
Landmark2 to_local(const Pose2& p, const Landmark2& world);

/// Local-frame landmark observation mapped back to the world frame.
Landmark2 to_world(const Pose2& p, const Landmark2& local);

}  // namespace sbsos
