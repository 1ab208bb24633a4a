#include <cmath>

#include "doctest.h"
#include "sbsos/assemble.hpp"
#include "sbsos/sdp_solver.hpp"
#include "test_helpers.hpp"

using namespace sbsos;

namespace {

Decomposition single_block(const std::vector<VarId>& vars, int num_constraints,
                           int num_terms) {
  Decomposition d;
  d.blocks.resize(1);
  d.blocks[0].vars = vars;
  for (int j = 0; j < num_constraints; ++j) d.blocks[0].constraints.push_back(j);
  for (int t = 0; t < num_terms; ++t) d.blocks[0].terms.push_back(t);
  return d;
}

struct ReducedSlam {
  std::vector<Polynomial> terms;
  std::vector<ConstraintPoly> constraints;
  VariableIndex index;
};

ReducedSlam reduced_slam(const FactorGraph& g, int anchor = 0) {
  VariableIndex idx(g);
  std::vector<Polynomial> terms;
  for (const RelPoseFactor& f : g.edges) terms.push_back(build_pose_cost(f, idx));
  for (const LandmarkFactor& f : g.land_edges) {
    terms.push_back(build_landmark_cost(f, idx));
  }
  GaugeReduced r =
      apply_gauge(terms, build_constraints(g.num_poses, idx), anchor, idx);
  return {std::move(r.cost_terms), std::move(r.constraints), idx};
}

}  // namespace

TEST_CASE("gauge substitution pins the anchor pose") {
  Rng rng(61);
  const FactorGraph g = testing::random_graph(2, 0, 0, rng);
  const ReducedSlam r = reduced_slam(g);
  REQUIRE(r.terms.size() == 1);
  // Remaining variables are the second pose's four.
  const std::vector<VarId> expected = {4, 5, 6, 7};
  CHECK(r.terms[0].support() == expected);
  CHECK(r.constraints.size() == 2);

  // Reduced cost at a reduced assignment equals the full cost at the
  // anchored assignment.
  const VariableIndex idx(g);
  Assignment a = testing::random_assignment(2, 0, rng);
  a.poses[0] = Pose2::identity();
  CHECK(r.terms[0].eval(idx.to_dense(a)) ==
        doctest::Approx(total_cost(g, a)).epsilon(1e-10));

  CHECK_THROWS_AS(
      apply_gauge(r.terms, build_constraints(2, idx), 7, idx),
      std::invalid_argument);
}

TEST_CASE("monomial basis is one plus the block variables") {
  Block b;
  b.vars = {3, 5, 9};
  const std::vector<Monomial> basis = monomial_basis(b);
  REQUIRE(basis.size() == 4);
  CHECK(basis[0].is_constant());
  CHECK(basis[1] == Monomial::var(3));
  CHECK(basis[3] == Monomial::var(9));
  Block empty;
  CHECK_THROWS_AS(monomial_basis(empty), std::invalid_argument);
}

TEST_CASE("multiplier polynomials at d = 1") {
  const VariableIndex idx(1, 0);
  const std::vector<ConstraintPoly> gs = build_constraints(1, idx);
  Block b;
  b.vars = {idx.c(0), idx.s(0)};
  b.constraints = {0};

  const std::vector<Polynomial> h = build_multiplier_polys(b, gs, 1);
  REQUIRE(h.size() == 3);  // 2|J| + 1
  CHECK(h[0].constant_term() == 1.0);
  CHECK(h[1].terms() == gs[0].g.terms());
  CHECK(h[2].terms() == (Polynomial(1.0) - gs[0].g).terms());

  b.constraints = {0, 1};
  CHECK(build_multiplier_polys(b, gs, 1).size() == 5);

  // Generic enumeration count: multi-indices of degree <= d over 2|J| slots.
  CHECK(build_multiplier_polys(b, gs, 2).size() == 15);  // C(4+2, 2)
  Block unconstrained;
  unconstrained.vars = {0};
  CHECK(build_multiplier_polys(unconstrained, gs, 1).size() == 1);
}

TEST_CASE("square cost with no constraints bounds at zero") {
  std::vector<Polynomial> terms;
  terms.push_back(Polynomial::term(1.0, Monomial::var(0, 2)));  // x^2
  const Decomposition d = single_block({0}, 0, 1);
  const Assembly assembly = assemble(terms, {}, d, {});
  CHECK(assembly.sdp.psd_dims == std::vector<int>{2});
  CHECK(assembly.sdp.num_nonneg == 1);  // the constant multiplier
  CHECK(assembly.sdp.num_free == 1 + 3);

  SolverConfig config;
  config.tol = 1e-9;
  const ConicSolution sol = solve(assembly.sdp, config);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("shifted square over a box bounds at zero, any d") {
  // f = (x - 1)^2, K = {0 <= x/2 <= 1}; the minimum over K is 0 at x = 1.
  Polynomial x = Polynomial::variable(0);
  std::vector<Polynomial> terms = {(x - Polynomial(1.0)) * (x - Polynomial(1.0))};
  std::vector<ConstraintPoly> gs;
  gs.push_back({x * 0.5, 0});
  const Decomposition d = single_block({0}, 1, 1);

  for (int degree = 1; degree <= 2; ++degree) {
    RelaxationParams params;
    params.d = degree;  // linear constraints keep products quadratic
    const Assembly assembly = assemble(terms, gs, d, params);
    SolverConfig config;
    config.tol = 1e-9;
    const ConicSolution sol = solve(assembly.sdp, config);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-7));
  }
}

TEST_CASE("quadratic constraints at d = 2 are rejected at k = 1") {
  Rng rng(62);
  const FactorGraph g = testing::random_graph(2, 0, 0, rng);
  const ReducedSlam r = reduced_slam(g);
  const InteractionGraph ig = interaction_graph(r.terms, r.constraints);
  const Decomposition d = chordal_blocks(ig, r.terms, r.constraints);
  RelaxationParams params;
  params.d = 2;
  CHECK_THROWS_WITH_AS(assemble(r.terms, r.constraints, d, params),
                       doctest::Contains("k > 1"), std::invalid_argument);
  params.d = 1;
  params.k = 2;
  CHECK_THROWS_AS(assemble(r.terms, r.constraints, d, params),
                  std::invalid_argument);
}

TEST_CASE("single-block decomposition reproduces the dense assembly") {
  Rng rng(63);
  const FactorGraph g = testing::random_graph(2, 0, 0, rng);
  const ReducedSlam r = reduced_slam(g);
  const InteractionGraph ig = interaction_graph(r.terms, r.constraints);
  const Decomposition chordal = chordal_blocks(ig, r.terms, r.constraints);
  REQUIRE(chordal.blocks.size() == 1);  // two poses collapse to one block

  std::vector<VarId> all_vars;
  for (const Polynomial& t : r.terms) {
    for (VarId v : t.support()) all_vars.push_back(v);
  }
  std::sort(all_vars.begin(), all_vars.end());
  all_vars.erase(std::unique(all_vars.begin(), all_vars.end()), all_vars.end());
  const Decomposition dense = single_block(
      all_vars, static_cast<int>(r.constraints.size()),
      static_cast<int>(r.terms.size()));

  const Assembly a = assemble(r.terms, r.constraints, chordal, {});
  const Assembly b = assemble(r.terms, r.constraints, dense, {});
  CHECK(a.sdp.to_text() == b.sdp.to_text());
}

TEST_CASE("zero-noise two-pose relaxation is exact") {
  // Unit-weight identity-rotation measurement one unit forward.
  FactorGraph g;
  g.num_poses = 2;
  g.pose_ids = {0, 1};
  g.edges.push_back(RelPoseFactor::from_angle(0, 1, 1.0, 0.0, 0.0));
  const ReducedSlam r = reduced_slam(g);
  const InteractionGraph ig = interaction_graph(r.terms, r.constraints);
  const Decomposition d = chordal_blocks(ig, r.terms, r.constraints);
  const Assembly assembly = assemble(r.terms, r.constraints, d, {});

  SolverConfig config;
  config.tol = 1e-9;
  const ConicSolution sol = solve(assembly.sdp, config);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-7));

  // Weak duality: the bound never exceeds the cost of feasible assignments.
  Rng rng(64);
  const VariableIndex idx(g);
  for (int t = 0; t < 50; ++t) {
    Assignment a = testing::random_assignment(2, 0, rng);
    a.poses[0] = Pose2::identity();
    CHECK(sol.objective <= total_cost(g, a) + 1e-7);
  }
}

TEST_CASE("per-block equality counts and block locality") {
  Rng rng(65);
  const FactorGraph g = testing::random_graph(4, 1, 1, rng);
  const ReducedSlam r = reduced_slam(g);
  const InteractionGraph ig = interaction_graph(r.terms, r.constraints);
  const Decomposition d = chordal_blocks(ig, r.terms, r.constraints);
  const Assembly assembly = assemble(r.terms, r.constraints, d, {});

  int expected_rows = static_cast<int>(assembly.global_monomials.size());
  for (const BlockAssembly& ba : assembly.blocks) {
    const int nb = static_cast<int>(ba.basis_vars.size()) + 1;
    CHECK(static_cast<int>(ba.monomials.size()) == svec_size(nb));
    expected_rows += svec_size(nb);
  }
  CHECK(assembly.sdp.num_rows() == expected_rows);

  // Block locality: a block's Gram and multiplier columns touch only that
  // block's own matching rows.
  const Eigen::MatrixXd dense(assembly.sdp.A);
  for (size_t l = 0; l < assembly.blocks.size(); ++l) {
    const BlockAssembly& ba = assembly.blocks[l];
    const int rows_begin = ba.eq_row_offset;
    const int rows_end = rows_begin + static_cast<int>(ba.monomials.size());
    for (int col = ba.q_offset;
         col < ba.q_offset + svec_size(static_cast<int>(ba.basis_vars.size()) + 1);
         ++col) {
      for (int row = 0; row < assembly.sdp.num_rows(); ++row) {
        if (dense(row, col) != 0.0) {
          CHECK(row >= rows_begin);
          CHECK(row < rows_end);
        }
      }
    }
  }
}
