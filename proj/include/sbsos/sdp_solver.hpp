#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbsos/sdp_problem.hpp"

namespace sbsos {

enum class SolveStatus {
  kOptimal,
  kNearOptimal,
  kMaxIter,
  kInfeasibleDetected,
  kNumericalFailure,
};

std::string to_string(SolveStatus s);

enum class SolverBackend {
  kStructuredInteriorPoint,  // sparse NT path-following; the default
  kFirstOrder,               // operator-splitting ADMM
  kDenseInteriorPoint,       // dense reference, small problems only
};

struct SolverConfig {
  double tol = 1e-7;
  int max_iter = 50000;
  bool scaling = true;  // presolve reductions and row equilibration
  uint64_t seed = 0;    // reserved for randomized restarts; unused by default
  SolverBackend backend = SolverBackend::kStructuredInteriorPoint;
  double over_relaxation = 1.6;  // ADMM settings
  bool adaptive_penalty = true;
  double penalty = 1.0;  // initial ADMM penalty rho
  int check_interval = 25;
  bool verbose = false;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Eigen::VectorXd v;  // primal, cone-feasible
  Eigen::VectorXd y;  // equality duals, one per original row
  Eigen::VectorXd s;  // dual slack, cone-order coordinates
  double objective = 0.0;       // c' v (the maximization objective)
  double dual_objective = 0.0;  // matching bound from the duals
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double rel_gap = 0.0;
  std::string message;

  bool usable() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kNearOptimal;
  }
};

/// One pivoted-out free variable: `var` was solved out of dropped row `row`
/// (pivot `coeff`), whose remaining entries and right-hand side are kept for
/// reconstruction. `other_entries` are the variable's coefficients in the
/// surviving rows, used to rebuild the dropped row's dual multiplier.
struct Elimination {
  int var = 0;
  int row = 0;
  double coeff = 0.0;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> row_entries;    // (col, coeff), col != var
  std::vector<std::pair<int, double>> other_entries;  // (row, coeff)
};

/// Two nonnegative variables whose columns are exact negations act as the
/// positive and negative parts of one free multiplier; `free_col` is the
/// replacement column appended to the reduced problem.
struct MergedNonnegPair {
  int pos = 0;
  int neg = 0;
  int free_col = 0;
};

struct PresolveResult {
  SdpProblem problem;
  int original_vars = 0;
  std::vector<int> kept_rows;   // index into original rows
  std::vector<int> kept_cols;   // reduced column -> workspace column id
  Eigen::VectorXd row_scale;    // kept row r was divided by row_scale[r]
  std::vector<Elimination> eliminations;
  std::vector<MergedNonnegPair> merges;
  int removed_duplicates = 0;
  int removed_zero_rows = 0;
  bool infeasible = false;
  std::string message;
};

/// Pivots out free variables that touch at most two equality rows (the
/// split-cost coefficients of the relaxation all do), then removes zero and
/// duplicate rows and scales the remainder to unit norm. Detects trivially
/// contradictory rows. Eliminated variables and dropped-row duals are
/// reconstructed exactly in postsolve.
PresolveResult presolve(const SdpProblem& p);

/// Fills eliminated primal entries and dropped-row duals back into a
/// solution of the reduced problem. `solve` applies this automatically.
void postsolve(const PresolveResult& pre, ConicSolution& sol);

/// Solves the conic program with the configured backend (presolve included).
/// Duals are reported for the original row numbering.
ConicSolution solve(const SdpProblem& p, const SolverConfig& config = {});

/// Sparse NT-scaled primal-dual path-following backend. The Schur complement
/// is formed in closed form from the scaling matrices and factored as a
/// quasi-definite augmented system, so clique-tree structured relaxations
/// solve in a few dozen Newton steps.
ConicSolution solve_structured_interior_point(const SdpProblem& p,
                                              const SolverConfig& config = {});

/// Dense primal-dual interior-point reference backend. Independent of the
/// other paths; intended for cross-checks at small sizes.
ConicSolution solve_interior_point(const SdpProblem& p,
                                   const SolverConfig& config = {});

}  // namespace sbsos
