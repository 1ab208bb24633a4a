#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "sbsos/rng.hpp"
#include "sbsos/sdp_solver.hpp"

using namespace sbsos;

namespace {

SdpProblem min_t_bordered_psd() {
  // minimize t s.t. [[t, 1], [1, t]] >= 0; optimum t = 1 by the determinant
  // condition t^2 >= 1 with t >= 0.
  SdpProblem p;
  p.psd_dims = {2};
  p.num_free = 1;
  p.c = Eigen::VectorXd::Zero(4);
  p.c[3] = -1.0;  // maximize -t
  std::vector<Eigen::Triplet<double>> t;
  // svec layout: [Q00, sqrt(2) Q01, Q11, t]
  t.emplace_back(0, 0, 1.0);
  t.emplace_back(0, 3, -1.0);  // Q00 - t = 0
  t.emplace_back(1, 2, 1.0);
  t.emplace_back(1, 3, -1.0);  // Q11 - t = 0
  t.emplace_back(2, 1, 1.0);   // sqrt(2) Q01 = sqrt(2)
  p.A.resize(3, 4);
  p.A.setFromTriplets(t.begin(), t.end());
  p.b = Eigen::VectorXd::Zero(3);
  p.b[2] = std::sqrt(2.0);
  return p;
}

Eigen::MatrixXd random_pd(int n, Rng& rng) {
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = rng.normal();
  }
  return r * r.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
}

// Random mixed-cone problem with a planted primal-dual feasible pair, so both
// backends face a well-posed instance.
SdpProblem random_feasible_sdp(Rng& rng, int psd_dim, int nonneg, int free_vars,
                               int rows) {
  SdpProblem p;
  p.psd_dims = {psd_dim};
  p.num_nonneg = nonneg;
  p.num_free = free_vars;
  const int n = p.num_vars();

  Eigen::MatrixXd a(rows, n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = rng.normal();
  }
  Eigen::VectorXd x0(n);
  x0.head(svec_size(psd_dim)) = matrix_to_svec(random_pd(psd_dim, rng));
  for (int i = 0; i < nonneg; ++i) x0[svec_size(psd_dim) + i] = rng.uniform(0.2, 2.0);
  for (int i = 0; i < free_vars; ++i) {
    x0[svec_size(psd_dim) + nonneg + i] = rng.normal();
  }
  Eigen::VectorXd y0(rows);
  for (int r = 0; r < rows; ++r) y0[r] = rng.normal();
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(n);
  s0.head(svec_size(psd_dim)) = matrix_to_svec(random_pd(psd_dim, rng));
  for (int i = 0; i < nonneg; ++i) s0[svec_size(psd_dim) + i] = rng.uniform(0.2, 2.0);

  p.A = a.sparseView();
  p.b = a * x0;
  const Eigen::VectorXd cp = a.transpose() * y0 + s0;
  p.c = -cp;  // maximize -cp'v == minimize cp'v
  return p;
}

}  // namespace

TEST_CASE("bordered psd toy problem solves to one") {
  const SdpProblem p = min_t_bordered_psd();
  SolverConfig config;
  config.tol = 1e-9;
  const ConicSolution sol = solve(p, config);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.v[3] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(sol.rel_gap <= 1e-8);
}

TEST_CASE("equality-pinned lp embedded as a one-by-one block") {
  // min x s.t. x = 3, x >= 0.
  SdpProblem p;
  p.psd_dims = {1};
  p.c = Eigen::VectorXd::Constant(1, -1.0);
  std::vector<Eigen::Triplet<double>> t;
  t.emplace_back(0, 0, 1.0);
  p.A.resize(1, 1);
  p.A.setFromTriplets(t.begin(), t.end());
  p.b = Eigen::VectorXd::Constant(1, 3.0);
  const ConicSolution sol = solve(p);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.v[0] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(-3.0));
}

TEST_CASE("first-order and interior-point objectives agree") {
  Rng rng(51);
  for (int t = 0; t < 8; ++t) {
    const SdpProblem p = random_feasible_sdp(rng, 3, 2, 2, 6);
    SolverConfig fo;
    fo.tol = 1e-9;
    SolverConfig ipm;
    ipm.tol = 1e-9;
    ipm.backend = SolverBackend::kInteriorPoint;
    const ConicSolution a = solve(p, fo);
    const ConicSolution b = solve(p, ipm);
    REQUIRE(a.usable());
    REQUIRE(b.usable());
    CHECK(std::abs(a.objective - b.objective) <=
          1e-6 * std::max(1.0, std::abs(b.objective)));
  }
}

TEST_CASE("solutions satisfy the advertised optimality invariants") {
  Rng rng(52);
  const SdpProblem p = random_feasible_sdp(rng, 4, 3, 1, 8);
  SolverConfig config;
  config.tol = 1e-8;
  const ConicSolution sol = solve(p, config);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(std::abs(sol.objective - sol.dual_objective) /
            std::max(1.0, std::abs(sol.objective)) <=
        10.0 * config.tol);
  const Eigen::MatrixXd q = svec_to_matrix(sol.v.head(svec_size(4)), 4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  CHECK(es.eigenvalues().minCoeff() >= -config.tol * std::max(1.0, q.norm()));
}

TEST_CASE("identical configuration replays identically") {
  Rng rng(53);
  const SdpProblem p = random_feasible_sdp(rng, 3, 1, 1, 5);
  SolverConfig config;
  config.max_iter = 500;  // stop mid-stream; iterates must still match
  const ConicSolution a = solve(p, config);
  const ConicSolution b = solve(p, config);
  REQUIRE(a.v.size() == b.v.size());
  CHECK((a.v - b.v).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("presolve removes duplicates and zero rows") {
  SdpProblem p;
  p.psd_dims = {};
  p.num_nonneg = 2;
  p.num_free = 1;
  p.c = Eigen::VectorXd::Zero(3);
  std::vector<Eigen::Triplet<double>> t;
  t.emplace_back(0, 0, 1.0);
  t.emplace_back(0, 1, 2.0);
  t.emplace_back(1, 0, 2.0);  // exact scalar multiple of row 0
  t.emplace_back(1, 1, 4.0);
  t.emplace_back(3, 2, 1.0);
  p.A.resize(4, 3);  // row 2 is entirely zero
  p.A.setFromTriplets(t.begin(), t.end());
  p.b.resize(4);
  p.b << 1.0, 2.0, 0.0, 5.0;

  const PresolveResult pre = presolve(p);
  CHECK_FALSE(pre.infeasible);
  CHECK(pre.removed_duplicates == 1);
  CHECK(pre.removed_zero_rows == 1);
  REQUIRE(pre.problem.num_rows() == 2);
  CHECK(pre.kept_rows == std::vector<int>{0, 3});
  // Kept rows are scaled to unit norm.
  const Eigen::MatrixXd dense(pre.problem.A);
  for (int r = 0; r < pre.problem.num_rows(); ++r) {
    CHECK(dense.row(r).norm() == doctest::Approx(1.0));
  }

  // Idempotence: a presolved problem passes through unchanged.
  const PresolveResult again = presolve(pre.problem);
  CHECK(again.removed_duplicates == 0);
  CHECK(again.removed_zero_rows == 0);
  CHECK(again.problem.to_text() == pre.problem.to_text());
}

TEST_CASE("presolve flags contradictory duplicates") {
  SdpProblem p;
  p.num_nonneg = 1;
  p.num_free = 0;
  p.c = Eigen::VectorXd::Zero(1);
  std::vector<Eigen::Triplet<double>> t;
  t.emplace_back(0, 0, 1.0);
  t.emplace_back(1, 0, 1.0);
  p.A.resize(2, 1);
  p.A.setFromTriplets(t.begin(), t.end());
  p.b.resize(2);
  p.b << 1.0, 2.0;
  const PresolveResult pre = presolve(p);
  CHECK(pre.infeasible);
  const ConicSolution sol = solve(p);
  CHECK(sol.status == SolveStatus::kInfeasibleDetected);
}

TEST_CASE("problem text serialization round trips") {
  Rng rng(54);
  const SdpProblem p = random_feasible_sdp(rng, 2, 2, 1, 4);
  const SdpProblem back = SdpProblem::from_text(p.to_text());
  CHECK(back.psd_dims == p.psd_dims);
  CHECK(back.num_nonneg == p.num_nonneg);
  CHECK(back.num_free == p.num_free);
  CHECK((back.b - p.b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.c - p.c).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((Eigen::MatrixXd(back.A) - Eigen::MatrixXd(p.A)).lpNorm<Eigen::Infinity>() ==
        0.0);
}

TEST_CASE("svec preserves inner products") {
  Rng rng(55);
  const Eigen::MatrixXd a = random_pd(4, rng);
  const Eigen::MatrixXd b = random_pd(4, rng);
  const double direct = (a.array() * b.array()).sum();
  CHECK(matrix_to_svec(a).dot(matrix_to_svec(b)) ==
        doctest::Approx(direct).epsilon(1e-12));
  const Eigen::MatrixXd back = svec_to_matrix(matrix_to_svec(a), 4);
  CHECK((back - a).lpNorm<Eigen::Infinity>() <= 1e-14);
}
