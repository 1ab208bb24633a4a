#include "sbsos/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "sbsos/assemble.hpp"
#include "sbsos/decomposition.hpp"
#include "sbsos/poly_build.hpp"

namespace sbsos {

PipelineResult run_sbsos(const FactorGraph& g, const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  g.validate();

  PipelineResult result;
  result.scale_factor = opts.scale > 0.0 ? opts.scale : auto_scale_factor(g);
  const ScaleTransform st{result.scale_factor};
  const FactorGraph scaled = scale(g, st);

  const VariableIndex index(scaled);
  std::vector<Polynomial> terms;
  terms.reserve(scaled.edges.size() + scaled.land_edges.size());
  for (const RelPoseFactor& f : scaled.edges) {
    terms.push_back(build_pose_cost(f, index));
  }
  for (const LandmarkFactor& f : scaled.land_edges) {
    terms.push_back(build_landmark_cost(f, index));
  }
  const std::vector<ConstraintPoly> constraints =
      build_constraints(scaled.num_poses, index);

  const GaugeReduced reduced =
      apply_gauge(terms, constraints, opts.anchor, index);

  const InteractionGraph ig =
      interaction_graph(reduced.cost_terms, reduced.constraints);
  ChordalOptions copts;
  copts.coalesce = opts.coalesce_blocks;
  const Decomposition decomp =
      chordal_blocks(ig, reduced.cost_terms, reduced.constraints, copts);
  result.warnings = decomp.warnings;
  result.decomposition_json = decomp.to_json();
  result.num_blocks = static_cast<int>(decomp.blocks.size());
  for (const Block& b : decomp.blocks) {
    result.max_block_size =
        std::max(result.max_block_size, static_cast<int>(b.vars.size()));
  }

  RelaxationParams params;
  params.d = opts.d;
  params.gauge_anchor = opts.anchor;
  const Assembly assembly =
      assemble(reduced.cost_terms, reduced.constraints, decomp, params);

  SolverConfig config;
  config.tol = opts.tol > 0.0 ? opts.tol : (g.num_poses >= 60 ? 1e-6 : 1e-8);
  config.max_iter = opts.max_iter > 0 ? opts.max_iter
                                      : (g.num_poses >= 60 ? 120000 : 200000);
  config.backend = opts.use_interior_point ? SolverBackend::kInteriorPoint
                                           : SolverBackend::kFirstOrder;
  config.verbose = opts.verbose;
  const ConicSolution sol = solve(assembly.sdp, config);

  result.status = sol.status;
  result.iterations = sol.iterations;
  result.solver_primal_residual = sol.primal_residual;
  result.solver_dual_residual = sol.dual_residual;
  result.solver_gap = sol.rel_gap;
  if (!sol.message.empty()) result.warnings.push_back(sol.message);

  if (sol.status == SolveStatus::kNumericalFailure ||
      sol.status == SolveStatus::kInfeasibleDetected || sol.y.size() == 0) {
    const auto t1 = std::chrono::steady_clock::now();
    result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return result;
  }

  result.lower_bound = sol.objective;
  const std::vector<MomentBlock> moments = extract_moments(sol, assembly);
  const RecoveredAssignment recovered =
      recover_assignment(moments, index, opts.anchor);
  for (const std::string& f : recovered.flags) result.warnings.push_back(f);

  result.estimate = unscale(recovered.assignment, st);
  result.have_estimate = true;
  result.certificate = certify(g, result.estimate, result.lower_bound, moments,
                               opts.eps_cert, opts.rank_tol);
  result.certificate.moment_spread = recovered.moment_spread;

  const auto t1 = std::chrono::steady_clock::now();
  result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

namespace {

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

ErrorMetrics compare_to_truth(const Assignment& estimate, const Assignment& truth) {
  const Assignment e = anchor_first_pose(estimate);
  const Assignment t = anchor_first_pose(truth);
  ErrorMetrics m;
  double sq_sum = 0.0;
  int positions = 0;
  double angle_sum = 0.0;
  for (size_t i = 0; i < e.poses.size() && i < t.poses.size(); ++i) {
    const double dx = e.poses[i].x - t.poses[i].x;
    const double dy = e.poses[i].y - t.poses[i].y;
    sq_sum += dx * dx + dy * dy;
    ++positions;
    angle_sum += std::abs(wrap_angle(e.poses[i].angle() - t.poses[i].angle()));
  }
  for (size_t l = 0; l < e.landmarks.size() && l < t.landmarks.size(); ++l) {
    const double dx = e.landmarks[l].x - t.landmarks[l].x;
    const double dy = e.landmarks[l].y - t.landmarks[l].y;
    sq_sum += dx * dx + dy * dy;
    ++positions;
  }
  if (positions > 0) m.trans_rmse = std::sqrt(sq_sum / positions);
  if (!e.poses.empty()) m.rot_mae = angle_sum / static_cast<double>(e.poses.size());
  return m;
}

}  // namespace sbsos
