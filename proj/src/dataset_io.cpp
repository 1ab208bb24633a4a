#include "sbsos/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sbsos/rng.hpp"

namespace sbsos {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("g2o parse error at line " + std::to_string(line) +
                           ": " + what);
}

struct RawVertexSe2 {
  int64_t id;
  double x, y, theta;
};
struct RawVertexXy {
  int64_t id;
  double x, y;
};
struct RawEdgeSe2 {
  int64_t i, j;
  double dx, dy, dtheta;
  double i11, i12, i13, i22, i23, i33;
};
struct RawEdgeXy {
  int64_t i, l;
  double dx, dy;
  double i11, i12, i22;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ParsedDataset parse_g2o(std::istream& in) {
  std::vector<RawVertexSe2> vertices;
  std::vector<RawVertexXy> xy_vertices;
  std::vector<RawEdgeSe2> pose_edges;
  std::vector<RawEdgeXy> land_edges;
  std::vector<std::string> warnings;
  int dropped_offdiag = 0;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag.empty() || tag[0] == '#') continue;

    auto need = [&](auto&... field) {
      if (!((ls >> field) && ...)) parse_fail(line_no, "malformed " + tag + " record");
    };

    if (tag == "VERTEX_SE2") {
      RawVertexSe2 v{};
      need(v.id, v.x, v.y, v.theta);
      vertices.push_back(v);
    } else if (tag == "VERTEX_XY") {
      RawVertexXy v{};
      need(v.id, v.x, v.y);
      xy_vertices.push_back(v);
    } else if (tag == "EDGE_SE2") {
      RawEdgeSe2 e{};
      need(e.i, e.j, e.dx, e.dy, e.dtheta, e.i11, e.i12, e.i13, e.i22, e.i23, e.i33);
      if (e.i12 != 0.0 || e.i13 != 0.0 || e.i23 != 0.0) ++dropped_offdiag;
      pose_edges.push_back(e);
    } else if (tag == "EDGE_SE2_XY") {
      RawEdgeXy e{};
      need(e.i, e.l, e.dx, e.dy, e.i11, e.i12, e.i22);
      if (e.i12 != 0.0) ++dropped_offdiag;
      land_edges.push_back(e);
    } else {
      warnings.push_back("line " + std::to_string(line_no) +
                         ": unknown record type '" + tag + "' skipped");
    }
  }

  if (pose_edges.empty() && land_edges.empty()) {
    throw std::runtime_error("g2o parse error: no factors");
  }
  if (dropped_offdiag > 0) {
    warnings.push_back("dropped nonzero information off-diagonals on " +
                       std::to_string(dropped_offdiag) +
                       " edge(s); only blkdiag information is modeled");
  }

  // Dense remap, ascending external id. Edge endpoints without a vertex
  // record become implicit vertices.
  std::map<int64_t, int> pose_index;
  std::map<int64_t, int> landmark_index;
  for (const auto& v : vertices) pose_index.emplace(v.id, 0);
  for (const auto& e : pose_edges) {
    pose_index.emplace(e.i, 0);
    pose_index.emplace(e.j, 0);
  }
  for (const auto& v : xy_vertices) landmark_index.emplace(v.id, 0);
  for (const auto& e : land_edges) {
    pose_index.emplace(e.i, 0);
    landmark_index.emplace(e.l, 0);
  }

  ParsedDataset out;
  out.warnings = std::move(warnings);
  FactorGraph& g = out.graph;
  for (auto& [ext, idx] : pose_index) {
    idx = g.num_poses++;
    g.pose_ids.push_back(ext);
  }
  for (auto& [ext, idx] : landmark_index) {
    idx = g.num_landmarks++;
    g.landmark_ids.push_back(ext);
  }

  for (const auto& e : pose_edges) {
    g.edges.push_back(RelPoseFactor::from_angle(
        pose_index[e.i], pose_index[e.j], e.dx, e.dy, e.dtheta,
        /*w_rot2=*/e.i33, /*w_x2=*/e.i11, /*w_y2=*/e.i22));
  }
  for (const auto& e : land_edges) {
    g.land_edges.push_back(
        {pose_index[e.i], landmark_index[e.l], e.dx, e.dy, e.i11, e.i22});
  }

  if (!vertices.empty() || !xy_vertices.empty()) {
    Assignment init;
    init.poses.assign(g.num_poses, Pose2::identity());
    init.landmarks.assign(g.num_landmarks, Landmark2{});
    int missing = g.num_poses + g.num_landmarks;
    for (const auto& v : vertices) {
      init.poses[pose_index[v.id]] = Pose2::from_angle(v.theta, v.x, v.y);
      --missing;
    }
    for (const auto& v : xy_vertices) {
      init.landmarks[landmark_index[v.id]] = {v.x, v.y};
      --missing;
    }
    if (missing > 0) {
      out.warnings.push_back(std::to_string(missing) +
                             " node(s) without VERTEX record initialized to "
                             "identity in the initial guess");
    }
    out.initial = std::move(init);
  }
  return out;
}

ParsedDataset parse_g2o_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_g2o(in);
}

Assignment parse_estimate(std::istream& in, const FactorGraph& like) {
  std::map<int64_t, int> pose_index;
  std::map<int64_t, int> landmark_index;
  for (int i = 0; i < like.num_poses; ++i) pose_index[like.pose_ids[i]] = i;
  for (int l = 0; l < like.num_landmarks; ++l) {
    landmark_index[like.landmark_ids[l]] = l;
  }

  Assignment a;
  a.poses.assign(like.num_poses, Pose2::identity());
  a.landmarks.assign(like.num_landmarks, Landmark2{});
  std::vector<bool> have_pose(like.num_poses, false);
  std::vector<bool> have_landmark(like.num_landmarks, false);

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "VERTEX_SE2") {
      int64_t id;
      double x, y, theta;
      if (!(ls >> id >> x >> y >> theta)) parse_fail(line_no, "malformed VERTEX_SE2");
      auto it = pose_index.find(id);
      if (it == pose_index.end()) continue;  // estimate may cover a supergraph
      a.poses[it->second] = Pose2::from_angle(theta, x, y);
      have_pose[it->second] = true;
    } else if (tag == "VERTEX_XY") {
      int64_t id;
      double x, y;
      if (!(ls >> id >> x >> y)) parse_fail(line_no, "malformed VERTEX_XY");
      auto it = landmark_index.find(id);
      if (it == landmark_index.end()) continue;
      a.landmarks[it->second] = {x, y};
      have_landmark[it->second] = true;
    }
  }
  for (int i = 0; i < like.num_poses; ++i) {
    if (!have_pose[i]) {
      throw std::runtime_error("estimate missing VERTEX_SE2 for node " +
                               std::to_string(like.pose_ids[i]));
    }
  }
  for (int l = 0; l < like.num_landmarks; ++l) {
    if (!have_landmark[l]) {
      throw std::runtime_error("estimate missing VERTEX_XY for node " +
                               std::to_string(like.landmark_ids[l]));
    }
  }
  return a;
}

Assignment parse_estimate_file(const std::string& path, const FactorGraph& like) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_estimate(in, like);
}

std::string write_g2o(const FactorGraph& g, const Assignment* assignment) {
  std::ostringstream os;
  if (assignment != nullptr) {
    for (int i = 0; i < g.num_poses; ++i) {
      const Pose2& p = assignment->poses.at(i);
      os << "VERTEX_SE2 " << g.pose_ids.at(i) << " " << fmt(p.x) << " "
         << fmt(p.y) << " " << fmt(p.angle()) << "\n";
    }
    for (int l = 0; l < g.num_landmarks; ++l) {
      const Landmark2& lm = assignment->landmarks.at(l);
      os << "VERTEX_XY " << g.landmark_ids.at(l) << " " << fmt(lm.x) << " "
         << fmt(lm.y) << "\n";
    }
  }
  for (const RelPoseFactor& f : g.edges) {
    os << "EDGE_SE2 " << g.pose_ids.at(f.i) << " " << g.pose_ids.at(f.j) << " "
       << fmt(f.x) << " " << fmt(f.y) << " " << fmt(f.theta) << " "
       << fmt(f.w_x2) << " 0 0 " << fmt(f.w_y2) << " 0 " << fmt(f.w_rot2)
       << "\n";
  }
  for (const LandmarkFactor& f : g.land_edges) {
    os << "EDGE_SE2_XY " << g.pose_ids.at(f.i) << " " << g.landmark_ids.at(f.ell)
       << " " << fmt(f.x) << " " << fmt(f.y) << " " << fmt(f.w_x2) << " 0 "
       << fmt(f.w_y2) << "\n";
  }
  return os.str();
}

void write_g2o_file(const std::string& path, const FactorGraph& g,
                    const Assignment* assignment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << write_g2o(g, assignment);
}

TrajectoryShape trajectory_shape_from_string(const std::string& name) {
  if (name == "manhattan") return TrajectoryShape::kManhattan;
  if (name == "loop") return TrajectoryShape::kLoop;
  throw std::invalid_argument("unknown trajectory shape '" + name + "'");
}

namespace {

constexpr double kClosureRadius = 1.3;
constexpr double kClosureProb = 0.3;
constexpr int kClosureMinGap = 3;
constexpr double kObserveRadius = 3.0;

Assignment ground_truth_trajectory(TrajectoryShape shape, int n, Rng& rng) {
  Assignment truth;
  truth.poses.reserve(n);
  if (shape == TrajectoryShape::kLoop) {
    const double radius = std::max(1.0, n / (2.0 * std::numbers::pi));
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / n;
      truth.poses.push_back(Pose2::from_angle(phi + std::numbers::pi / 2.0,
                                              radius * std::cos(phi),
                                              radius * std::sin(phi)));
    }
    return truth;
  }
  // Grid walk: unit steps, right-angle turns.
  double heading = 0.0;
  double px = 0.0, py = 0.0;
  for (int k = 0; k < n; ++k) {
    truth.poses.push_back(Pose2::from_angle(heading, px, py));
    const double u = rng.uniform();
    if (u < 0.25) {
      heading += std::numbers::pi / 2.0;
    } else if (u < 0.5) {
      heading -= std::numbers::pi / 2.0;
    }
    px += std::cos(heading);
    py += std::sin(heading);
  }
  return truth;
}

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

SyntheticWorld synthesize(TrajectoryShape shape, int num_poses,
                          int num_landmarks, const NoiseSpec& noise) {
  if (num_poses < 2) throw std::invalid_argument("need at least 2 poses");
  if (num_landmarks < 0) throw std::invalid_argument("negative landmark count");
  if (!(noise.kappa_rot > 0.0 && noise.sigma_x > 0.0 && noise.sigma_y > 0.0 &&
        noise.sigma_lx > 0.0 && noise.sigma_ly > 0.0)) {
    throw std::invalid_argument("noise concentrations and stds must be positive");
  }

  Rng rng(noise.seed);
  SyntheticWorld world;
  world.truth = ground_truth_trajectory(shape, num_poses, rng);

  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const Pose2& p : world.truth.poses) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double pad_x = std::max(1.0, 0.1 * (max_x - min_x));
  const double pad_y = std::max(1.0, 0.1 * (max_y - min_y));
  for (int l = 0; l < num_landmarks; ++l) {
    world.truth.landmarks.push_back({rng.uniform(min_x - pad_x, max_x + pad_x),
                                     rng.uniform(min_y - pad_y, max_y + pad_y)});
  }

  FactorGraph& g = world.graph;
  g.num_poses = num_poses;
  g.num_landmarks = num_landmarks;
  for (int i = 0; i < num_poses; ++i) g.pose_ids.push_back(i);
  for (int l = 0; l < num_landmarks; ++l) g.landmark_ids.push_back(num_poses + l);

  const double w_rot2 = noise.kappa_rot / 2.0;
  const double w_x2 = 1.0 / (noise.sigma_x * noise.sigma_x);
  const double w_y2 = 1.0 / (noise.sigma_y * noise.sigma_y);
  const double w_lx2 = 1.0 / (noise.sigma_lx * noise.sigma_lx);
  const double w_ly2 = 1.0 / (noise.sigma_ly * noise.sigma_ly);

  auto add_pose_edge = [&](int i, int j) {
    const Pose2 rel = relative(world.truth.poses[i], world.truth.poses[j]);
    double dtheta = rel.angle();
    double dx = rel.x, dy = rel.y;
    if (!noise.disabled) {
      dtheta = wrap_angle(dtheta + rng.von_mises(noise.kappa_rot));
      dx += rng.normal(noise.sigma_x);
      dy += rng.normal(noise.sigma_y);
    }
    g.edges.push_back(
        RelPoseFactor::from_angle(i, j, dx, dy, dtheta, w_rot2, w_x2, w_y2));
  };

  for (int i = 0; i + 1 < num_poses; ++i) add_pose_edge(i, i + 1);

  for (int i = 0; i < num_poses; ++i) {
    for (int j = i + kClosureMinGap; j < num_poses; ++j) {
      const double d = std::hypot(world.truth.poses[i].x - world.truth.poses[j].x,
                                  world.truth.poses[i].y - world.truth.poses[j].y);
      if (d <= kClosureRadius && rng.uniform() < kClosureProb) {
        add_pose_edge(i, j);
      }
    }
  }

  auto add_landmark_edge = [&](int i, int l) {
    Landmark2 local = to_local(world.truth.poses[i], world.truth.landmarks[l]);
    if (!noise.disabled) {
      local.x += rng.normal(noise.sigma_lx);
      local.y += rng.normal(noise.sigma_ly);
    }
    g.land_edges.push_back({i, l, local.x, local.y, w_lx2, w_ly2});
  };

  for (int l = 0; l < num_landmarks; ++l) {
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    bool seen = false;
    for (int i = 0; i < num_poses; ++i) {
      const double d = std::hypot(world.truth.poses[i].x - world.truth.landmarks[l].x,
                                  world.truth.poses[i].y - world.truth.landmarks[l].y);
      if (d < best) {
        best = d;
        nearest = i;
      }
      if (d <= kObserveRadius) {
        add_landmark_edge(i, l);
        seen = true;
      }
    }
    if (!seen) add_landmark_edge(nearest, l);
  }

  g.validate();
  return world;
}

SyntheticWorld take_prefix(const FactorGraph& g, const Assignment& truth,
                           int count) {
  if (count < 1 || count > g.num_poses) {
    throw std::invalid_argument("prefix count out of range");
  }
  SyntheticWorld out;
  FactorGraph& p = out.graph;
  p.num_poses = count;
  p.pose_ids.assign(g.pose_ids.begin(), g.pose_ids.begin() + count);
  out.truth.poses.assign(truth.poses.begin(), truth.poses.begin() + count);

  std::vector<int> landmark_map(g.num_landmarks, -1);
  for (const LandmarkFactor& f : g.land_edges) {
    if (f.i >= count) continue;
    if (landmark_map[f.ell] < 0) {
      landmark_map[f.ell] = p.num_landmarks++;
      p.landmark_ids.push_back(g.landmark_ids[f.ell]);
      out.truth.landmarks.push_back(truth.landmarks[f.ell]);
    }
  }
  for (const RelPoseFactor& f : g.edges) {
    if (f.i < count && f.j < count) p.edges.push_back(f);
  }
  for (const LandmarkFactor& f : g.land_edges) {
    if (f.i >= count) continue;
    LandmarkFactor kept = f;
    kept.ell = landmark_map[f.ell];
    p.land_edges.push_back(kept);
  }
  p.validate();
  return out;
}

double auto_scale_factor(const FactorGraph& g) {
  double m = 0.0;
  for (const RelPoseFactor& f : g.edges) {
    m = std::max({m, std::abs(f.x), std::abs(f.y)});
  }
  for (const LandmarkFactor& f : g.land_edges) {
    m = std::max({m, std::abs(f.x), std::abs(f.y)});
  }
  return m > 0.0 ? m : 1.0;
}

FactorGraph scale(const FactorGraph& g, const ScaleTransform& t) {
  if (!(t.factor > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  FactorGraph out = g;
  const double f2 = t.factor * t.factor;
  for (RelPoseFactor& f : out.edges) {
    f.x /= t.factor;
    f.y /= t.factor;
    f.w_x2 *= f2;
    f.w_y2 *= f2;
  }
  for (LandmarkFactor& f : out.land_edges) {
    f.x /= t.factor;
    f.y /= t.factor;
    f.w_x2 *= f2;
    f.w_y2 *= f2;
  }
  return out;
}

Assignment scale_assignment(const Assignment& a, const ScaleTransform& t) {
  if (!(t.factor > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  Assignment out = a;
  for (Pose2& p : out.poses) {
    p.x /= t.factor;
    p.y /= t.factor;
  }
  for (Landmark2& l : out.landmarks) {
    l.x /= t.factor;
    l.y /= t.factor;
  }
  return out;
}

Assignment unscale(const Assignment& a, const ScaleTransform& t) {
  if (!(t.factor > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  Assignment out = a;
  for (Pose2& p : out.poses) {
    p.x *= t.factor;
    p.y *= t.factor;
  }
  for (Landmark2& l : out.landmarks) {
    l.x *= t.factor;
    l.y *= t.factor;
  }
  return out;
}

}  // namespace sbsos
