#include <cmath>

#include "doctest.h"
#include "sbsos/lm.hpp"
#include "test_helpers.hpp"

using namespace sbsos;

namespace {

// Central finite differences of the residual vector.
Eigen::MatrixXd fd_jacobian(const FactorGraph& g, const ThetaAssignment& a,
                            int anchor, double h = 1e-6) {
  auto perturb = [&](int param, double delta) {
    ThetaAssignment out = a;
    int cursor = 0;
    for (int i = 0; i < g.num_poses; ++i) {
      if (i == anchor) continue;
      if (param == cursor) out.theta[i] += delta;
      if (param == cursor + 1) out.x[i] += delta;
      if (param == cursor + 2) out.y[i] += delta;
      cursor += 3;
    }
    for (int l = 0; l < g.num_landmarks; ++l) {
      if (param == cursor) out.lx[l] += delta;
      if (param == cursor + 1) out.ly[l] += delta;
      cursor += 2;
    }
    return out;
  };
  const int params = 3 * (g.num_poses - 1) + 2 * g.num_landmarks;
  const Eigen::VectorXd r0 = residual_vector(g, a);
  Eigen::MatrixXd j(r0.size(), params);
  for (int p = 0; p < params; ++p) {
    const Eigen::VectorXd rp = residual_vector(g, perturb(p, h));
    const Eigen::VectorXd rm = residual_vector(g, perturb(p, -h));
    j.col(p) = (rp - rm) / (2.0 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("residual norm squared equals the total cost") {
  Rng rng(81);
  for (int t = 0; t < 100; ++t) {
    const FactorGraph g = testing::random_graph(5, 2, 2, rng);
    const Assignment a = testing::random_assignment(5, 2, rng);
    const ThetaAssignment ta = ThetaAssignment::from(a);
    CHECK(residual_vector(g, ta).squaredNorm() ==
          doctest::Approx(total_cost(g, a)).epsilon(1e-12));
  }
}

TEST_CASE("zero-noise ground truth has zero residuals") {
  NoiseSpec spec;
  spec.seed = 1;
  spec.disabled = true;
  const SyntheticWorld world = synthesize(TrajectoryShape::kLoop, 8, 2, spec);
  const Eigen::VectorXd r =
      residual_vector(world.graph, ThetaAssignment::from(world.truth));
  CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("single-factor residuals match hand values") {
  FactorGraph g;
  g.num_poses = 2;
  g.pose_ids = {0, 1};
  g.edges.push_back(RelPoseFactor::from_angle(0, 1, 1.0, 0.0, 0.0, 4.0, 9.0, 16.0));
  Assignment a;
  a.poses = {Pose2::identity(), Pose2::from_angle(0.0, 2.0, 1.0)};
  const Eigen::VectorXd r = residual_vector(g, ThetaAssignment::from(a));
  REQUIRE(r.size() == 6);
  CHECK(r[0] == doctest::Approx(0.0));  // rotation matches exactly
  CHECK(r[1] == doctest::Approx(0.0));
  CHECK(r[2] == doctest::Approx(0.0));
  CHECK(r[3] == doctest::Approx(0.0));
  CHECK(r[4] == doctest::Approx(3.0 * (2.0 - 1.0)));  // sqrt(9) * dx
  CHECK(r[5] == doctest::Approx(4.0 * 1.0));          // sqrt(16) * dy
}

TEST_CASE("analytic jacobian agrees with finite differences") {
  Rng rng(82);
  for (int t = 0; t < 3; ++t) {
    const FactorGraph g = testing::random_graph(10, 2, 4, rng);
    const ThetaAssignment a =
        ThetaAssignment::from(testing::random_assignment(10, 2, rng));
    const Eigen::MatrixXd analytic(lm_jacobian(g, a, 0));
    const Eigen::MatrixXd fd = fd_jacobian(g, a, 0);
    const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
    CHECK((analytic - fd).cwiseAbs().maxCoeff() / scale <= 1e-6);
  }
}

TEST_CASE("jacobian sparsity follows variable incidence") {
  Rng rng(83);
  const FactorGraph g = testing::random_graph(4, 1, 0, rng);
  const ThetaAssignment a =
      ThetaAssignment::from(testing::random_assignment(4, 1, rng));
  const Eigen::MatrixXd j(lm_jacobian(g, a, 0));
  // Rows of the edge (2, 3) cannot touch pose 1's parameters (columns 0-2).
  const int row_base = 6 * 2;  // third edge in the odometry chain
  for (int r = row_base; r < row_base + 6; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(j(r, c) == 0.0);
  }
}

TEST_CASE("lm reaches the global optimum of a zero-noise pair") {
  FactorGraph g;
  g.num_poses = 2;
  g.pose_ids = {0, 1};
  g.edges.push_back(RelPoseFactor::from_angle(0, 1, 1.0, 0.5, 0.7));
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const LmResult r = lm_solve(g, random_init(g, seed));
    CHECK(r.cost <= 1e-12);
  }
}

TEST_CASE("starting at the truth never worsens the cost") {
  NoiseSpec spec;
  spec.seed = 5;
  const SyntheticWorld world = synthesize(TrajectoryShape::kManhattan, 15, 3, spec);
  const ThetaAssignment init = ThetaAssignment::from(world.truth);
  const double initial_cost =
      residual_vector(world.graph, init).squaredNorm();
  const LmResult r = lm_solve(world.graph, init);
  CHECK(r.cost <= initial_cost + 1e-12);
}

TEST_CASE("random inits are deterministic, in-bounds, and distinct") {
  Rng rng(84);
  const FactorGraph g = testing::random_graph(6, 1, 2, rng);
  const ThetaAssignment a = random_init(g, 42);
  const ThetaAssignment b = random_init(g, 42);
  const ThetaAssignment c = random_init(g, 43);
  CHECK(a.theta == b.theta);
  CHECK(a.x == b.x);
  bool any_different = false;
  for (size_t i = 0; i < a.theta.size(); ++i) {
    any_different = any_different || a.theta[i] != c.theta[i];
  }
  CHECK(any_different);
  for (double th : a.theta) {
    CHECK(th <= 3.1415926536);
    CHECK(th >= -3.1415926536);
  }
}
