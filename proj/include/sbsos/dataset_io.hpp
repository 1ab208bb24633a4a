#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbsos/factor_graph.hpp"

namespace sbsos {

/// Measurement noise model for the synthesizer. Rotation noise is a von
/// Mises angle perturbation with concentration kappa_rot; translation and
/// landmark noise are zero-mean Gaussians. Weights handed to the factors are
/// w_rot2 = kappa_rot / 2 and w_* = 1 / sigma_*^2, so the synthesized cost is
/// the negative log-likelihood up to a constant.
struct NoiseSpec {
  double kappa_rot = 50.0;
  double sigma_x = 0.05;
  double sigma_y = 0.05;
  double sigma_lx = 0.05;
  double sigma_ly = 0.05;
  uint64_t seed = 0;
  bool disabled = false;  // zero-noise surrogate for infinite concentration
};

/// Uniform division of all translational data by `factor`.
struct ScaleTransform {
  double factor = 1.0;
};

struct ParsedDataset {
  FactorGraph graph;
  std::optional<Assignment> initial;  // from VERTEX records, when present
  std::vector<std::string> warnings;
};

/// Reads the supported g2o records (VERTEX_SE2, VERTEX_XY, EDGE_SE2,
/// EDGE_SE2_XY). Unknown record types are skipped with a warning; nonzero
/// information off-diagonals are dropped with a warning; malformed lines
/// throw std::runtime_error with the line number. The parsed graph is not
/// validated here; callers reject disconnected graphs at load time.
ParsedDataset parse_g2o(std::istream& in);
ParsedDataset parse_g2o_file(const std::string& path);

/// Reads only VERTEX records (estimate / ground-truth files). Vertex ids
/// must match `like`'s remap tables.
Assignment parse_estimate(std::istream& in, const FactorGraph& like);
Assignment parse_estimate_file(const std::string& path, const FactorGraph& like);

/// Deterministic writer: vertices ascending by id, then edges in input
/// order, floats at 17 significant digits so parse(write(g)) is value-exact.
std::string write_g2o(const FactorGraph& g, const Assignment* assignment = nullptr);
void write_g2o_file(const std::string& path, const FactorGraph& g,
                    const Assignment* assignment = nullptr);

enum class TrajectoryShape { kManhattan, kLoop };

TrajectoryShape trajectory_shape_from_string(const std::string& name);

struct SyntheticWorld {
  FactorGraph graph;
  Assignment truth;
};

/// Generates a ground-truth trajectory (grid walk or closed loop), scatters
/// `num_landmarks` landmarks in its bounding box, adds odometry edges plus
/// proximity loop closures and landmark observations, and perturbs all
/// measurements per `noise`. Deterministic in noise.seed.
SyntheticWorld synthesize(TrajectoryShape shape, int num_poses,
                          int num_landmarks, const NoiseSpec& noise);

/// First `count` poses in trajectory order, the landmarks they observe, and
/// all factors internal to the kept set, renumbered densely.
SyntheticWorld take_prefix(const FactorGraph& g, const Assignment& truth,
                           int count);

/// Largest absolute translational measurement; 1 when there is none.
double auto_scale_factor(const FactorGraph& g);

/// Divides every translational measurement by t.factor and multiplies the
/// translational weights by factor^2; rotations are untouched. The cost of
/// correspondingly scaled assignments is invariant.
FactorGraph scale(const FactorGraph& g, const ScaleTransform& t);

/// Maps an assignment into scaled coordinates (divide x, y, lx, ly).
Assignment scale_assignment(const Assignment& a, const ScaleTransform& t);

/// Maps a recovered assignment back to original coordinates.
Assignment unscale(const Assignment& a, const ScaleTransform& t);

}  // namespace sbsos
