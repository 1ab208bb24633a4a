#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sbsos/factor_graph.hpp"

namespace sbsos {

/// Angle-parameterized assignment for the baseline solver.
struct ThetaAssignment {
  std::vector<double> theta;  // wrapped to (-pi, pi]
  std::vector<double> x, y;
  std::vector<double> lx, ly;

  static ThetaAssignment from(const Assignment& a);
  Assignment to_assignment() const;
};

/// Stacked weighted residuals, one group of six per pose edge (four rotation
/// entries then the two translation entries), then two per landmark edge,
/// both in graph order. The squared norm equals total_cost exactly.
Eigen::VectorXd residual_vector(const FactorGraph& g, const ThetaAssignment& a);

/// Analytic Jacobian of residual_vector with respect to the free parameters
/// [theta_i, x_i, y_i] for every non-anchor pose followed by [lx_l, ly_l].
Eigen::SparseMatrix<double> lm_jacobian(const FactorGraph& g,
                                        const ThetaAssignment& a, int anchor);

struct LmConfig {
  int max_iter = 200;
  double gradient_tol = 1e-9;
  double step_tol = 1e-12;
  int anchor = 0;
};

struct LmResult {
  ThetaAssignment estimate;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Gauss-Newton with multiplicative damping updates; accepted steps
/// never increase the cost and the best iterate is returned.
LmResult lm_solve(const FactorGraph& g, const ThetaAssignment& init,
                  const LmConfig& config = {});

/// Random restart point: angles uniform on the circle, positions uniform in
/// the dead-reckoned odometry bounding box inflated 2x. Deterministic per
/// seed.
ThetaAssignment random_init(const FactorGraph& g, uint64_t seed);

}  // namespace sbsos
