#pragma once

#include <string>
#include <vector>

#include "sbsos/factor_graph.hpp"
#include "sbsos/polynomial.hpp"

namespace sbsos {

/// Dense variable numbering: pose i owns ids (4i..4i+3) = (c, s, x, y),
/// landmark l owns (4n + 2l, 4n + 2l + 1) = (lx, ly).
class VariableIndex {
 public:
  VariableIndex(int num_poses, int num_landmarks)
      : num_poses_(num_poses), num_landmarks_(num_landmarks) {}

  explicit VariableIndex(const FactorGraph& g)
      : VariableIndex(g.num_poses, g.num_landmarks) {}

  VarId c(int pose) const { return 4 * pose; }
  VarId s(int pose) const { return 4 * pose + 1; }
  VarId x(int pose) const { return 4 * pose + 2; }
  VarId y(int pose) const { return 4 * pose + 3; }
  VarId lx(int landmark) const { return 4 * num_poses_ + 2 * landmark; }
  VarId ly(int landmark) const { return 4 * num_poses_ + 2 * landmark + 1; }

  int num_poses() const { return num_poses_; }
  int num_landmarks() const { return num_landmarks_; }
  int num_vars() const { return 4 * num_poses_ + 2 * num_landmarks_; }

  std::string describe(VarId v) const;

  std::vector<double> to_dense(const Assignment& a) const;
  Assignment to_assignment(const std::vector<double>& values) const;

 private:
  int num_poses_;
  int num_landmarks_;
};

/// Quadratic cost polynomial of one relative-pose factor: four squared
/// rotation residuals plus the two weighted translation residuals, over the
/// eight variables of poses i and j.
Polynomial build_pose_cost(const RelPoseFactor& f, const VariableIndex& index);

/// Quadratic cost polynomial of one landmark observation.
Polynomial build_landmark_cost(const LandmarkFactor& f,
                               const VariableIndex& index);

/// Box-form rewrite of the unit-circle conditions. Values of g stay in [0, 1]
/// on the feasible set.
struct ConstraintPoly {
  Polynomial g;
  int pose = 0;  // which pose the constraint belongs to
};

/// Two constraints per pose: 1 - c^2 - s^2 and 2 - c^2 - s^2, in pose order.
std::vector<ConstraintPoly> build_constraints(int num_poses,
                                              const VariableIndex& index);

}  // namespace sbsos
