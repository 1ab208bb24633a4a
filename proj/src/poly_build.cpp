#include "sbsos/poly_build.hpp"

#include <stdexcept>

namespace sbsos {

std::string VariableIndex::describe(VarId v) const {
  if (v < 0 || v >= num_vars()) return "x" + std::to_string(v) + "?";
  static const char* pose_part[] = {"c", "s", "x", "y"};
  if (v < 4 * num_poses_) {
    return std::string(pose_part[v % 4]) + std::to_string(v / 4);
  }
  const int l = (v - 4 * num_poses_) / 2;
  return std::string((v - 4 * num_poses_) % 2 == 0 ? "lx" : "ly") +
         std::to_string(l);
}

std::vector<double> VariableIndex::to_dense(const Assignment& a) const {
  if (static_cast<int>(a.poses.size()) != num_poses_ ||
      static_cast<int>(a.landmarks.size()) != num_landmarks_) {
    throw std::invalid_argument("assignment does not match variable index");
  }
  std::vector<double> v(num_vars());
  for (int i = 0; i < num_poses_; ++i) {
    v[c(i)] = a.poses[i].c;
    v[s(i)] = a.poses[i].s;
    v[x(i)] = a.poses[i].x;
    v[y(i)] = a.poses[i].y;
  }
  for (int l = 0; l < num_landmarks_; ++l) {
    v[lx(l)] = a.landmarks[l].x;
    v[ly(l)] = a.landmarks[l].y;
  }
  return v;
}

Assignment VariableIndex::to_assignment(const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != num_vars()) {
    throw std::invalid_argument("dense vector does not match variable index");
  }
  Assignment a;
  a.poses.resize(num_poses_);
  a.landmarks.resize(num_landmarks_);
  for (int i = 0; i < num_poses_; ++i) {
    a.poses[i] = {values[c(i)], values[s(i)], values[x(i)], values[y(i)]};
  }
  for (int l = 0; l < num_landmarks_; ++l) {
    a.landmarks[l] = {values[lx(l)], values[ly(l)]};
  }
  return a;
}

namespace {

// w * (sum_k coeff_k * var_k + constant)^2 expanded into a Polynomial.
Polynomial squared_affine(double w,
                          const std::vector<std::pair<VarId, double>>& lin,
                          double constant) {
  Polynomial residual(constant);
  for (const auto& [v, coeff] : lin) {
    residual += Polynomial::term(coeff, Monomial::var(v));
  }
  return residual * residual * w;
}

}  // namespace

Polynomial build_pose_cost(const RelPoseFactor& f, const VariableIndex& index) {
  const VarId ci = index.c(f.i), si = index.s(f.i);
  const VarId xi = index.x(f.i), yi = index.y(f.i);
  const VarId cj = index.c(f.j), sj = index.s(f.j);
  const VarId xj = index.x(f.j), yj = index.y(f.j);

  Polynomial cost;
  cost += squared_affine(f.w_rot2, {{cj, 1.0}, {ci, -f.c}, {si, f.s}}, 0.0);
  cost += squared_affine(f.w_rot2, {{sj, -1.0}, {ci, f.s}, {si, f.c}}, 0.0);
  cost += squared_affine(f.w_rot2, {{sj, 1.0}, {si, -f.c}, {ci, -f.s}}, 0.0);
  cost += squared_affine(f.w_rot2, {{cj, 1.0}, {si, f.s}, {ci, -f.c}}, 0.0);
  cost += squared_affine(f.w_x2, {{xj, 1.0}, {ci, -f.x}, {si, f.y}, {xi, -1.0}}, 0.0);
  cost += squared_affine(f.w_y2, {{yj, 1.0}, {si, -f.x}, {ci, -f.y}, {yi, -1.0}}, 0.0);
  return cost;
}

Polynomial build_landmark_cost(const LandmarkFactor& f,
                               const VariableIndex& index) {
  const VarId ci = index.c(f.i), si = index.s(f.i);
  const VarId xi = index.x(f.i), yi = index.y(f.i);
  const VarId lx = index.lx(f.ell), ly = index.ly(f.ell);

  Polynomial cost;
  cost += squared_affine(f.w_x2, {{lx, 1.0}, {ci, -f.x}, {si, f.y}, {xi, -1.0}}, 0.0);
  cost += squared_affine(f.w_y2, {{ly, 1.0}, {si, -f.x}, {ci, -f.y}, {yi, -1.0}}, 0.0);
  return cost;
}

std::vector<ConstraintPoly> build_constraints(int num_poses,
                                              const VariableIndex& index) {
  std::vector<ConstraintPoly> out;
  out.reserve(2 * num_poses);
  for (int i = 0; i < num_poses; ++i) {
    Polynomial circle;  // c_i^2 + s_i^2
    circle += Polynomial::term(1.0, Monomial::var(index.c(i), 2));
    circle += Polynomial::term(1.0, Monomial::var(index.s(i), 2));
    out.push_back({Polynomial(1.0) - circle, i});
    out.push_back({Polynomial(2.0) - circle, i});
  }
  return out;
}

}  // namespace sbsos
