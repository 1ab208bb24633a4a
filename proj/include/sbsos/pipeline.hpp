#pragma once

#include <string>
#include <vector>

#include "sbsos/dataset_io.hpp"
#include "sbsos/extract.hpp"
#include "sbsos/factor_graph.hpp"
#include "sbsos/sdp_solver.hpp"

namespace sbsos {

struct PipelineOptions {
  double scale = 0.0;  // 0 = auto (largest translational measurement)
  int d = 1;
  double tol = 0.0;    // 0 = auto: 1e-8 small graphs, 1e-6 from 60 poses up
  int max_iter = 0;    // 0 = auto
  int anchor = 0;
  double eps_cert = 1e-4;
  double rank_tol = 1e-3;
  bool use_interior_point = false;
  bool coalesce_blocks = false;
  bool verbose = false;
};

struct PipelineResult {
  Assignment estimate;  // original units, anchor pose at the identity
  Certificate certificate;
  SolveStatus status = SolveStatus::kNumericalFailure;
  bool have_estimate = false;
  double lower_bound = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  double scale_factor = 1.0;
  double solver_primal_residual = 0.0;
  double solver_dual_residual = 0.0;
  double solver_gap = 0.0;
  int num_blocks = 0;
  int max_block_size = 0;
  std::string decomposition_json;
  std::vector<std::string> warnings;
};

/// scale -> gauge-anchor -> decompose -> assemble -> solve -> extract ->
/// certify -> unscale. The certificate is evaluated against the original
/// graph; the bound transfers because cost values are scale-invariant.
PipelineResult run_sbsos(const FactorGraph& g, const PipelineOptions& opts = {});

struct ErrorMetrics {
  double trans_rmse = 0.0;  // positions of poses and landmarks
  double rot_mae = 0.0;     // wrapped absolute pose angle error
};

/// Errors after re-expressing both trajectories with pose 0 at the identity,
/// so the comparison is gauge-consistent.
ErrorMetrics compare_to_truth(const Assignment& estimate, const Assignment& truth);

}  // namespace sbsos
