#pragma once

#include <vector>

#include "sbsos/decomposition.hpp"
#include "sbsos/poly_build.hpp"
#include "sbsos/polynomial.hpp"
#include "sbsos/sdp_problem.hpp"

namespace sbsos {

/// Relaxation levels. Only k = 1 assembly is implemented; d > 1 multiplier
/// enumeration is generic but its degree-4 products are rejected at k = 1.
struct RelaxationParams {
  int k = 1;
  int d = 1;
  int gauge_anchor = 0;  // internal pose index pinned to the identity
};

struct GaugeReduced {
  std::vector<Polynomial> cost_terms;
  std::vector<ConstraintPoly> constraints;
};

/// Substitutes the anchor pose's four variables by the identity values
/// (c=1, s=0, x=0, y=0) in every cost term and drops the anchor's two circle
/// constraints. This removes the global rigid-motion freedom from the
/// program; the reduced optimum equals the full optimum over anchored
/// assignments.
GaugeReduced apply_gauge(const std::vector<Polynomial>& cost_terms,
                         const std::vector<ConstraintPoly>& constraints,
                         int anchor, const VariableIndex& index);

/// SOS basis of a block at k = 1: [1, x_{i1}, ..., x_{in}].
std::vector<Monomial> monomial_basis(const Block& block);

/// One polynomial per multiplier coefficient: products
/// prod_j g_j^alpha_j (1-g_j)^beta_j over the block's constraints with
/// |alpha| + |beta| <= d, enumerated degree-first then slot-lexicographic.
/// Index 0 is the constant multiplier.
std::vector<Polynomial> build_multiplier_polys(
    const Block& block, const std::vector<ConstraintPoly>& constraints, int d);

/// Per-block bookkeeping tying SDP coordinates back to polynomial data.
struct BlockAssembly {
  std::vector<VarId> basis_vars;     // block variables, ascending
  std::vector<Monomial> monomials;   // all degree-<=2 monomials over the block
  int q_offset = 0;                  // svec(Q) start in the variable vector
  int lambda_offset = 0;
  int lambda_count = 0;
  int f_offset = 0;                  // split-cost coefficient variables
  int eq_row_offset = 0;             // first coefficient-matching row

  /// Position of `m` in `monomials`, or -1.
  int monomial_index(const Monomial& m) const;
};

struct Assembly {
  SdpProblem sdp;
  std::vector<BlockAssembly> blocks;
  std::vector<Monomial> global_monomials;
  int global_row_offset = 0;
  int t_var_index = 0;
  Polynomial objective_poly;  // the summed cost being bounded
};

/// Builds the level-(k=1, d) relaxation of min f s.t. 0 <= g_j <= 1 as a
/// standard-form SDP: per block, a Gram matrix over [1; x_I] plus nonnegative
/// multiplier weights, the per-block identity f_l = h_l + sigma_l matched
/// coefficient-by-coefficient, and the global identity f - t = sum_l f_l.
/// With a single block this is exactly the dense relaxation.
Assembly assemble(const std::vector<Polynomial>& cost_terms,
                  const std::vector<ConstraintPoly>& constraints,
                  const Decomposition& decomposition,
                  const RelaxationParams& params);

}  // namespace sbsos
