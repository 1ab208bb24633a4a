#pragma once

#include <cstdint>
#include <vector>

#include "sbsos/pose2.hpp"

namespace sbsos {

/// Relative-pose measurement between poses i and j. The measured rotation is
/// stored both as an angle (kept verbatim for value-exact file round trips)
/// and as its (cos, sin) pair, which is what every cost expression uses.
/// Weights are information-matrix diagonals: w_rot2 is the rotation
/// concentration, w_x2/w_y2 the translation information entries.
struct RelPoseFactor {
  int i = 0;
  int j = 0;
  double theta = 0.0;
  double c = 1.0;
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double w_rot2 = 1.0;
  double w_x2 = 1.0;
  double w_y2 = 1.0;

  static RelPoseFactor from_angle(int i, int j, double dx, double dy,
                                  double dtheta, double w_rot2 = 1.0,
                                  double w_x2 = 1.0, double w_y2 = 1.0);
};

/// Landmark observed from pose i, measured in that pose's local frame.
struct LandmarkFactor {
  int i = 0;
  int ell = 0;
  double x = 0.0;
  double y = 0.0;
  double w_x2 = 1.0;
  double w_y2 = 1.0;
};

/// Pose/landmark factor graph over dense internal indices. External node ids
/// from dataset files are kept in the remap tables for output.
struct FactorGraph {
  int num_poses = 0;
  int num_landmarks = 0;
  std::vector<RelPoseFactor> edges;
  std::vector<LandmarkFactor> land_edges;
  std::vector<int64_t> pose_ids;      // internal index -> external id
  std::vector<int64_t> landmark_ids;  // internal index -> external id

  int num_variables() const { return 4 * num_poses + 2 * num_landmarks; }

  /// Checks index ranges, factor invariants, and that poses and landmarks
  /// form one connected component through the factors. Throws on violation.
  void validate() const;
};

/// Complete variable assignment: one Pose2 per pose, one Landmark2 per
/// landmark.
struct Assignment {
  std::vector<Pose2> poses;
  std::vector<Landmark2> landmarks;
};

/// Left-multiplies every pose (and transforms every landmark) by `g`.
Assignment transform(const Pose2& g, const Assignment& a);

/// Re-expresses `a` so that pose 0 becomes the identity. The cost is
/// invariant under this map.
Assignment anchor_first_pose(const Assignment& a);

double factor_cost_pose(const RelPoseFactor& f, const Assignment& a);
double factor_cost_landmark(const LandmarkFactor& f, const Assignment& a);

/// Sum of all factor costs; the ground-truth objective every other module is
/// checked against.
double total_cost(const FactorGraph& g, const Assignment& a);

}  // namespace sbsos
