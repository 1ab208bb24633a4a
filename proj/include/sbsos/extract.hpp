#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbsos/assemble.hpp"
#include "sbsos/factor_graph.hpp"
#include "sbsos/sdp_solver.hpp"

namespace sbsos {

/// Moment matrix of one block, read from the duals of that block's
/// coefficient-matching equalities and normalized so M(0,0) = 1.
struct MomentBlock {
  Eigen::MatrixXd M;
  std::vector<VarId> basis_vars;  // M is indexed by [1; x_basis_vars]
  double leading = 0.0;           // M(0,0) before normalization
  double min_eigenvalue = 0.0;
  double rank_ratio = 0.0;        // sigma_2 / sigma_1
  bool psd_violation = false;
};

/// Reads the dual multiplier of every block's SOS membership rows into a
/// symmetric moment matrix per block. Throws when a leading entry is below
/// `leading_tol` (degenerate dual; nothing to extract).
std::vector<MomentBlock> extract_moments(const ConicSolution& solution,
                                         const Assembly& assembly,
                                         double leading_tol = 1e-6);

struct RecoveredAssignment {
  Assignment assignment;
  double moment_spread = 0.0;  // worst disagreement between blocks on one var
  std::vector<std::string> flags;
};

/// First-order moments averaged over every block containing a variable;
/// (c, s) pairs are projected onto the unit circle and the anchor pose is
/// restored to the identity. Always returns, recording degeneracies in flags.
RecoveredAssignment recover_assignment(const std::vector<MomentBlock>& moments,
                                       const VariableIndex& index, int anchor);

struct Certificate {
  double lower_bound = 0.0;    // relaxation optimum t*
  double achieved_cost = 0.0;  // f at the recovered point
  double relative_gap = 0.0;
  double max_rank_ratio = 0.0;
  std::vector<double> rank_ratios;
  double moment_spread = 0.0;
  bool certified = false;
  std::string verdict;  // "certified-optimal" or "uncertified"

  std::string to_json() const;
};

/// Gap-based certificate: certified-optimal iff the relative duality gap is
/// at most eps_cert and every moment block is numerically rank one. A noisy
/// extraction can only produce "uncertified", never a false certificate.
Certificate certify(const FactorGraph& g, const Assignment& estimate,
                    double lower_bound, const std::vector<MomentBlock>& moments,
                    double eps_cert = 1e-4, double rank_tol = 1e-3);

}  // namespace sbsos
