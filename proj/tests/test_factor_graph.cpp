#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "sbsos/factor_graph.hpp"
#include "test_helpers.hpp"

using namespace sbsos;

namespace {

Eigen::Matrix2d rot(double c, double s) {
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

// Matrix-form oracle: w_rot2 ||Rj - Ri*Rm||_F^2 + ||tj - ti - Ri*tm||_Omega^2.
double matrix_cost_oracle(const RelPoseFactor& f, const Assignment& a) {
  const Pose2& pi = a.poses[f.i];
  const Pose2& pj = a.poses[f.j];
  const Eigen::Matrix2d ri = rot(pi.c, pi.s);
  const Eigen::Matrix2d rj = rot(pj.c, pj.s);
  const Eigen::Matrix2d rm = rot(f.c, f.s);
  const Eigen::Vector2d ti(pi.x, pi.y), tj(pj.x, pj.y), tm(f.x, f.y);
  const Eigen::Vector2d dt = tj - ti - ri * tm;
  return f.w_rot2 * (rj - ri * rm).squaredNorm() + f.w_x2 * dt.x() * dt.x() +
         f.w_y2 * dt.y() * dt.y();
}

}  // namespace

TEST_CASE("zero residual measurement costs nothing") {
  Assignment a;
  a.poses = {Pose2::identity(), Pose2::identity()};
  const RelPoseFactor f = RelPoseFactor::from_angle(0, 1, 0.0, 0.0, 0.0);
  CHECK(factor_cost_pose(f, a) == doctest::Approx(0.0));
}

TEST_CASE("quarter-turn rotation error costs four") {
  Assignment a;
  a.poses = {Pose2::identity(), Pose2::from_angle(std::numbers::pi / 2.0)};
  const RelPoseFactor f = RelPoseFactor::from_angle(0, 1, 0.0, 0.0, 0.0);
  CHECK(factor_cost_pose(f, a) == doctest::Approx(4.0));
}

TEST_CASE("unit translation error costs one") {
  Assignment a;
  a.poses = {Pose2::identity(), Pose2::from_angle(0.0, 2.0, 0.0)};
  const RelPoseFactor f = RelPoseFactor::from_angle(0, 1, 1.0, 0.0, 0.0);
  CHECK(factor_cost_pose(f, a) == doctest::Approx(1.0));
}

TEST_CASE("landmark costs match hand values") {
  Assignment a;
  a.poses = {Pose2::identity()};
  a.landmarks = {{1.0, 2.0}};
  CHECK(factor_cost_landmark({0, 0, 1.0, 2.0, 1.0, 1.0}, a) == doctest::Approx(0.0));

  a.landmarks = {{0.0, 0.0}};
  CHECK(factor_cost_landmark({0, 0, 1.0, 0.0, 1.0, 1.0}, a) == doctest::Approx(1.0));

  a.poses = {Pose2::from_angle(std::numbers::pi / 2.0)};
  a.landmarks = {{0.0, 1.0}};
  CHECK(factor_cost_landmark({0, 0, 1.0, 0.0, 1.0, 1.0}, a) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pose cost equals the matrix-form oracle") {
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    Assignment a = testing::random_assignment(2, 0, rng);
    const RelPoseFactor f = testing::random_pose_factor(0, 1, rng);
    CHECK(factor_cost_pose(f, a) ==
          doctest::Approx(matrix_cost_oracle(f, a)).epsilon(1e-10));
  }
}

TEST_CASE("total cost sums factor costs") {
  Rng rng(12);
  const FactorGraph g = testing::random_graph(5, 2, 3, rng);
  const Assignment a = testing::random_assignment(5, 2, rng);
  double expected = 0.0;
  for (const RelPoseFactor& f : g.edges) expected += factor_cost_pose(f, a);
  for (const LandmarkFactor& f : g.land_edges) {
    expected += factor_cost_landmark(f, a);
  }
  CHECK(total_cost(g, a) == doctest::Approx(expected).epsilon(1e-12));

  FactorGraph empty;
  empty.num_poses = 1;
  CHECK(total_cost(empty, {}) == 0.0);
}

TEST_CASE("cost is invariant under a global rigid transform") {
  // Rotation residuals are Frobenius differences and always invariant; the
  // translation residuals are weighted in the global frame, so invariance
  // requires the isotropic information the noise model produces.
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    FactorGraph g = testing::random_graph(4, 2, 2, rng);
    for (RelPoseFactor& f : g.edges) f.w_y2 = f.w_x2;
    for (LandmarkFactor& f : g.land_edges) f.w_y2 = f.w_x2;
    const Assignment a = testing::random_assignment(4, 2, rng);
    const Pose2 gauge = testing::random_pose(rng);
    const double before = total_cost(g, a);
    const double after = total_cost(g, transform(gauge, a));
    CHECK(after == doctest::Approx(before).epsilon(1e-8));
  }
}

TEST_CASE("measurements generated from a truth assignment cost zero") {
  Rng rng(14);
  Assignment truth = testing::random_assignment(6, 1, rng);
  FactorGraph g;
  g.num_poses = 6;
  g.num_landmarks = 1;
  for (int i = 0; i < 6; ++i) g.pose_ids.push_back(i);
  g.landmark_ids.push_back(6);
  for (int i = 0; i + 1 < 6; ++i) {
    const Pose2 rel = relative(truth.poses[i], truth.poses[i + 1]);
    g.edges.push_back(
        RelPoseFactor::from_angle(i, i + 1, rel.x, rel.y, rel.angle()));
  }
  const Landmark2 local = to_local(truth.poses[2], truth.landmarks[0]);
  g.land_edges.push_back({2, 0, local.x, local.y, 1.0, 1.0});
  CHECK(total_cost(g, truth) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("incomplete assignments are rejected") {
  const RelPoseFactor f = RelPoseFactor::from_angle(0, 1, 1.0, 0.0, 0.0);
  Assignment a;
  a.poses = {Pose2::identity()};
  CHECK_THROWS_AS(factor_cost_pose(f, a), std::out_of_range);
}

TEST_CASE("validation rejects broken graphs") {
  FactorGraph g;
  g.num_poses = 4;
  g.pose_ids = {0, 1, 2, 3};
  g.edges.push_back(RelPoseFactor::from_angle(0, 1, 1.0, 0.0, 0.0));
  g.edges.push_back(RelPoseFactor::from_angle(2, 3, 1.0, 0.0, 0.0));
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("disconnected"),
                       std::invalid_argument);

  g.edges.push_back(RelPoseFactor::from_angle(1, 2, 1.0, 0.0, 0.0));
  CHECK_NOTHROW(g.validate());

  FactorGraph self_loop = g;
  self_loop.edges.push_back(RelPoseFactor::from_angle(1, 1, 0.0, 0.0, 0.0));
  CHECK_THROWS_AS(self_loop.validate(), std::invalid_argument);

  FactorGraph bad_weight = g;
  bad_weight.edges[0].w_rot2 = 0.0;
  CHECK_THROWS_AS(bad_weight.validate(), std::invalid_argument);

  FactorGraph orphan_landmark = g;
  orphan_landmark.num_landmarks = 1;
  orphan_landmark.landmark_ids = {9};
  CHECK_THROWS_AS(orphan_landmark.validate(), std::invalid_argument);
}
