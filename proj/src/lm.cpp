#include "sbsos/lm.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "sbsos/rng.hpp"

namespace sbsos {

namespace {

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

// Free-parameter layout: 3 per non-anchor pose, then 2 per landmark.
struct ParamLayout {
  int num_poses;
  int num_landmarks;
  int anchor;

  int pose_base(int i) const { return 3 * (i < anchor ? i : i - 1); }
  int landmark_base(int l) const { return 3 * (num_poses - 1) + 2 * l; }
  int size() const { return 3 * (num_poses - 1) + 2 * num_landmarks; }
};

}  // namespace

ThetaAssignment ThetaAssignment::from(const Assignment& a) {
  ThetaAssignment t;
  for (const Pose2& p : a.poses) {
    t.theta.push_back(wrap_angle(p.angle()));
    t.x.push_back(p.x);
    t.y.push_back(p.y);
  }
  for (const Landmark2& l : a.landmarks) {
    t.lx.push_back(l.x);
    t.ly.push_back(l.y);
  }
  return t;
}

Assignment ThetaAssignment::to_assignment() const {
  Assignment a;
  for (size_t i = 0; i < theta.size(); ++i) {
    a.poses.push_back(Pose2::from_angle(theta[i], x[i], y[i]));
  }
  for (size_t l = 0; l < lx.size(); ++l) a.landmarks.push_back({lx[l], ly[l]});
  return a;
}

Eigen::VectorXd residual_vector(const FactorGraph& g, const ThetaAssignment& a) {
  if (a.theta.size() != static_cast<size_t>(g.num_poses) ||
      a.lx.size() != static_cast<size_t>(g.num_landmarks)) {
    throw std::invalid_argument("assignment does not match graph");
  }
  Eigen::VectorXd r(6 * g.edges.size() + 2 * g.land_edges.size());
  int row = 0;
  for (const RelPoseFactor& f : g.edges) {
    const double ci = std::cos(a.theta[f.i]), si = std::sin(a.theta[f.i]);
    const double cj = std::cos(a.theta[f.j]), sj = std::sin(a.theta[f.j]);
    const double wr = std::sqrt(f.w_rot2);
    r[row++] = wr * (cj - ci * f.c + si * f.s);
    r[row++] = wr * (-sj + ci * f.s + si * f.c);
    r[row++] = wr * (sj - si * f.c - ci * f.s);
    r[row++] = wr * (cj + si * f.s - ci * f.c);
    r[row++] = std::sqrt(f.w_x2) * (a.x[f.j] - ci * f.x + si * f.y - a.x[f.i]);
    r[row++] = std::sqrt(f.w_y2) * (a.y[f.j] - si * f.x - ci * f.y - a.y[f.i]);
  }
  for (const LandmarkFactor& f : g.land_edges) {
    const double ci = std::cos(a.theta[f.i]), si = std::sin(a.theta[f.i]);
    r[row++] = std::sqrt(f.w_x2) * (a.lx[f.ell] - ci * f.x + si * f.y - a.x[f.i]);
    r[row++] = std::sqrt(f.w_y2) * (a.ly[f.ell] - si * f.x - ci * f.y - a.y[f.i]);
  }
  return r;
}

Eigen::SparseMatrix<double> lm_jacobian(const FactorGraph& g,
                                        const ThetaAssignment& a, int anchor) {
  const ParamLayout layout{g.num_poses, g.num_landmarks, anchor};
  std::vector<Eigen::Triplet<double>> t;
  int row = 0;
  auto add = [&](int r, int col, double v) {
    if (col >= 0) t.emplace_back(r, col, v);
  };
  auto pose_cols = [&](int i) -> std::array<int, 3> {
    if (i == anchor) return {-1, -1, -1};
    const int base = layout.pose_base(i);
    return {base, base + 1, base + 2};  // theta, x, y
  };

  for (const RelPoseFactor& f : g.edges) {
    const double ci = std::cos(a.theta[f.i]), si = std::sin(a.theta[f.i]);
    const double cj = std::cos(a.theta[f.j]), sj = std::sin(a.theta[f.j]);
    const double wr = std::sqrt(f.w_rot2);
    const double wx = std::sqrt(f.w_x2), wy = std::sqrt(f.w_y2);
    const auto [ti, xi, yi] = pose_cols(f.i);
    const auto [tj, xj, yj] = pose_cols(f.j);

    add(row, ti, wr * (si * f.c + ci * f.s));
    add(row, tj, wr * -sj);
    ++row;
    add(row, ti, wr * (-si * f.s + ci * f.c));
    add(row, tj, wr * -cj);
    ++row;
    add(row, ti, wr * (si * f.s - ci * f.c));
    add(row, tj, wr * cj);
    ++row;
    add(row, ti, wr * (ci * f.s + si * f.c));
    add(row, tj, wr * -sj);
    ++row;
    add(row, ti, wx * (si * f.x + ci * f.y));
    add(row, xi, -wx);
    add(row, xj, wx);
    ++row;
    add(row, ti, wy * (-ci * f.x + si * f.y));
    add(row, yi, -wy);
    add(row, yj, wy);
    ++row;
  }
  for (const LandmarkFactor& f : g.land_edges) {
    const double ci = std::cos(a.theta[f.i]), si = std::sin(a.theta[f.i]);
    const double wx = std::sqrt(f.w_x2), wy = std::sqrt(f.w_y2);
    const auto [ti, xi, yi] = pose_cols(f.i);
    const int lxc = layout.landmark_base(f.ell);
    add(row, ti, wx * (si * f.x + ci * f.y));
    add(row, xi, -wx);
    add(row, lxc, wx);
    ++row;
    add(row, ti, wy * (-ci * f.x + si * f.y));
    add(row, yi, -wy);
    add(row, lxc + 1, wy);
    ++row;
  }

  Eigen::SparseMatrix<double> j(row, layout.size());
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

namespace {

ThetaAssignment apply_step(const ThetaAssignment& a, const Eigen::VectorXd& dx,
                           const ParamLayout& layout) {
  ThetaAssignment out = a;
  for (int i = 0; i < layout.num_poses; ++i) {
    if (i == layout.anchor) continue;
    const int base = layout.pose_base(i);
    out.theta[i] = wrap_angle(a.theta[i] + dx[base]);
    out.x[i] = a.x[i] + dx[base + 1];
    out.y[i] = a.y[i] + dx[base + 2];
  }
  for (int l = 0; l < layout.num_landmarks; ++l) {
    const int base = layout.landmark_base(l);
    out.lx[l] = a.lx[l] + dx[base];
    out.ly[l] = a.ly[l] + dx[base + 1];
  }
  return out;
}

}  // namespace

LmResult lm_solve(const FactorGraph& g, const ThetaAssignment& init,
                  const LmConfig& config) {
  const ParamLayout layout{g.num_poses, g.num_landmarks, config.anchor};
  LmResult result;
  ThetaAssignment current = init;
  // Gauge: the anchor pose is not a free parameter; pin it to the identity so
  // restarts and extracted solutions compare in the same frame.
  current.theta[config.anchor] = 0.0;
  current.x[config.anchor] = 0.0;
  current.y[config.anchor] = 0.0;

  Eigen::VectorXd r = residual_vector(g, current);
  double cost = r.squaredNorm();
  result.estimate = current;
  result.cost = cost;

  double mu = -1.0;  // initialized from the first normal matrix
  for (int iter = 0; iter < config.max_iter; ++iter) {
    result.iterations = iter + 1;
    const Eigen::SparseMatrix<double> J = lm_jacobian(g, current, config.anchor);
    const Eigen::VectorXd gradient = J.transpose() * r;
    if (gradient.lpNorm<Eigen::Infinity>() < config.gradient_tol) {
      result.converged = true;
      break;
    }
    Eigen::SparseMatrix<double> H = (J.transpose() * J).pruned();
    const Eigen::VectorXd diag = H.diagonal();
    if (mu < 0.0) mu = 1e-4 * std::max(1e-12, diag.maxCoeff());

    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::SparseMatrix<double> damped = H;
      for (int k = 0; k < damped.rows(); ++k) {
        damped.coeffRef(k, k) = diag[k] + mu * std::max(diag[k], 1e-12);
      }
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(damped);
      if (ldlt.info() != Eigen::Success) {
        mu *= 2.0;
        continue;
      }
      const Eigen::VectorXd dx = ldlt.solve(-gradient);
      const ThetaAssignment trial = apply_step(current, dx, layout);
      const Eigen::VectorXd r_trial = residual_vector(g, trial);
      const double trial_cost = r_trial.squaredNorm();
      if (trial_cost < cost) {
        current = trial;
        r = r_trial;
        cost = trial_cost;
        mu = std::max(mu * 0.5, 1e-15);
        accepted = true;
        if (cost < result.cost) {
          result.cost = cost;
          result.estimate = current;
        }
        if (dx.norm() < config.step_tol * (1.0 + dx.size())) {
          result.converged = true;
          iter = config.max_iter;  // exit outer loop
        }
        break;
      }
      mu *= 2.0;
    }
    if (!accepted) {
      result.converged = true;  // damping exhausted; local stationarity
      break;
    }
  }
  if (cost < result.cost) {
    result.cost = cost;
    result.estimate = current;
  }
  return result;
}

ThetaAssignment random_init(const FactorGraph& g, uint64_t seed) {
  // Dead-reckon a spanning tree of the measurements to size the search box.
  std::vector<Pose2> dead(g.num_poses, Pose2::identity());
  std::vector<bool> visited(g.num_poses, false);
  std::vector<std::vector<std::pair<int, const RelPoseFactor*>>> adj(g.num_poses);
  for (const RelPoseFactor& f : g.edges) {
    adj[f.i].push_back({f.j, &f});
    adj[f.j].push_back({f.i, &f});
  }
  std::queue<int> frontier;
  frontier.push(0);
  visited[0] = true;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (const auto& [j, f] : adj[i]) {
      if (visited[j]) continue;
      visited[j] = true;
      const Pose2 meas = Pose2{f->c, f->s, f->x, f->y};
      dead[j] = (f->i == i) ? compose(dead[i], meas)
                            : compose(dead[i], inverse(meas));
      frontier.push(j);
    }
  }
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const Pose2& p : dead) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);
  const double hx = std::max(1.0, max_x - min_x);  // half-width after 2x inflate
  const double hy = std::max(1.0, max_y - min_y);

  Rng rng(seed);
  ThetaAssignment out;
  out.theta.resize(g.num_poses);
  out.x.resize(g.num_poses);
  out.y.resize(g.num_poses);
  out.lx.resize(g.num_landmarks);
  out.ly.resize(g.num_landmarks);
  for (int i = 0; i < g.num_poses; ++i) {
    out.theta[i] = rng.uniform(-std::numbers::pi, std::numbers::pi);
    out.x[i] = rng.uniform(cx - hx, cx + hx);
    out.y[i] = rng.uniform(cy - hy, cy + hy);
  }
  for (int l = 0; l < g.num_landmarks; ++l) {
    out.lx[l] = rng.uniform(cx - hx, cx + hx);
    out.ly[l] = rng.uniform(cy - hy, cy + hy);
  }
  return out;
}

}  // namespace sbsos
