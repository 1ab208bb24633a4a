#include "sbsos/factor_graph.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sbsos {

RelPoseFactor RelPoseFactor::from_angle(int i, int j, double dx, double dy,
                                        double dtheta, double w_rot2,
                                        double w_x2, double w_y2) {
  RelPoseFactor f;
  f.i = i;
  f.j = j;
  f.theta = dtheta;
  f.c = std::cos(dtheta);
  f.s = std::sin(dtheta);
  f.x = dx;
  f.y = dy;
  f.w_rot2 = w_rot2;
  f.w_x2 = w_x2;
  f.w_y2 = w_y2;
  return f;
}

namespace {

// Union-find over pose nodes [0, n) and landmark nodes [n, n+w).
struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

void FactorGraph::validate() const {
  if (num_poses <= 0) throw std::invalid_argument("graph has no poses");
  if (edges.empty() && land_edges.empty()) {
    throw std::invalid_argument("graph has no factors");
  }
  for (const RelPoseFactor& f : edges) {
    if (f.i < 0 || f.i >= num_poses || f.j < 0 || f.j >= num_poses) {
      throw std::invalid_argument("pose factor references node out of range");
    }
    if (f.i == f.j) throw std::invalid_argument("pose factor with i == j");
    if (!(f.w_rot2 > 0.0 && f.w_x2 > 0.0 && f.w_y2 > 0.0)) {
      throw std::invalid_argument("pose factor with non-positive weight");
    }
    if (std::abs(f.c * f.c + f.s * f.s - 1.0) > 1e-9) {
      throw std::invalid_argument("pose factor rotation not normalized");
    }
  }
  for (const LandmarkFactor& f : land_edges) {
    if (f.i < 0 || f.i >= num_poses) {
      throw std::invalid_argument("landmark factor pose out of range");
    }
    if (f.ell < 0 || f.ell >= num_landmarks) {
      throw std::invalid_argument("landmark factor landmark out of range");
    }
    if (!(f.w_x2 > 0.0 && f.w_y2 > 0.0)) {
      throw std::invalid_argument("landmark factor with non-positive weight");
    }
  }

  DisjointSet ds(num_poses + num_landmarks);
  for (const RelPoseFactor& f : edges) ds.unite(f.i, f.j);
  std::vector<bool> observed(num_landmarks, false);
  for (const LandmarkFactor& f : land_edges) {
    ds.unite(f.i, num_poses + f.ell);
    observed[f.ell] = true;
  }
  for (int l = 0; l < num_landmarks; ++l) {
    if (!observed[l]) {
      throw std::invalid_argument("landmark " + std::to_string(l) +
                                  " has no observation");
    }
  }
  const int root = ds.find(0);
  for (int k = 1; k < num_poses + num_landmarks; ++k) {
    if (ds.find(k) != root) {
      throw std::invalid_argument(
          "factor graph is disconnected; the estimate would be unbounded");
    }
  }
}

Assignment transform(const Pose2& g, const Assignment& a) {
  Assignment out;
  out.poses.reserve(a.poses.size());
  out.landmarks.reserve(a.landmarks.size());
  for (const Pose2& p : a.poses) out.poses.push_back(compose(g, p));
  for (const Landmark2& l : a.landmarks) out.landmarks.push_back(to_world(g, l));
  return out;
}

Assignment anchor_first_pose(const Assignment& a) {
  if (a.poses.empty()) return a;
  return transform(inverse(a.poses.front()), a);
}

namespace {

void check_complete(const Assignment& a, int pose, int landmark) {
  if (pose >= static_cast<int>(a.poses.size())) {
    throw std::out_of_range("assignment missing pose " + std::to_string(pose));
  }
  if (landmark >= 0 && landmark >= static_cast<int>(a.landmarks.size())) {
    throw std::out_of_range("assignment missing landmark " +
                            std::to_string(landmark));
  }
}

}  // namespace

double factor_cost_pose(const RelPoseFactor& f, const Assignment& a) {
  check_complete(a, std::max(f.i, f.j), -1);
  const Pose2& pi = a.poses[f.i];
  const Pose2& pj = a.poses[f.j];
  // Four squared rotation residuals (the entrywise Frobenius difference of
  // R_j and R_i * Rbar), then the two translation residuals.
  const double r1 = pj.c - pi.c * f.c + pi.s * f.s;
  const double r2 = -pj.s + pi.c * f.s + pi.s * f.c;
  const double r3 = pj.s - pi.s * f.c - pi.c * f.s;
  const double r4 = pj.c + pi.s * f.s - pi.c * f.c;
  const double rot = f.w_rot2 * (r1 * r1 + r2 * r2 + r3 * r3 + r4 * r4);
  const double tx = pj.x - pi.c * f.x + pi.s * f.y - pi.x;
  const double ty = pj.y - pi.s * f.x - pi.c * f.y - pi.y;
  return rot + f.w_x2 * tx * tx + f.w_y2 * ty * ty;
}

double factor_cost_landmark(const LandmarkFactor& f, const Assignment& a) {
  check_complete(a, f.i, f.ell);
  const Pose2& pi = a.poses[f.i];
  const Landmark2& l = a.landmarks[f.ell];
  const double rx = l.x - pi.c * f.x + pi.s * f.y - pi.x;
  const double ry = l.y - pi.s * f.x - pi.c * f.y - pi.y;
  return f.w_x2 * rx * rx + f.w_y2 * ry * ry;
}

double total_cost(const FactorGraph& g, const Assignment& a) {
  double sum = 0.0;
  for (const RelPoseFactor& f : g.edges) sum += factor_cost_pose(f, a);
  for (const LandmarkFactor& f : g.land_edges) sum += factor_cost_landmark(f, a);
  return sum;
}

}  // namespace sbsos
