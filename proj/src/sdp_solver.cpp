#include "sbsos/sdp_solver.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace sbsos {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kNearOptimal: return "near-optimal";
    case SolveStatus::kMaxIter: return "max-iter";
    case SolveStatus::kInfeasibleDetected: return "infeasible-detected";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

// Live sparse row workspace for the elimination and cleanup passes.
struct RowWorkspace {
  std::vector<std::map<int, double>> rows;
  std::vector<double> rhs;
  std::vector<bool> alive;

  explicit RowWorkspace(const SdpProblem& p)
      : rows(p.num_rows()), rhs(p.num_rows()), alive(p.num_rows(), true) {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rm = p.A;
    for (int r = 0; r < rm.rows(); ++r) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, r);
           it; ++it) {
        if (it.value() != 0.0) rows[r][it.col()] = it.value();
      }
      rhs[r] = p.b[r];
    }
  }
};

// Pairs of nonnegative columns that are exact negations of each other are
// the split halves of one free multiplier; rewriting them as a single free
// column removes an unbounded ray from the optimal face (first-order methods
// cannot tolerate lineality there). Rows are untouched, so duals carry over.
std::vector<MergedNonnegPair> merge_negated_nonneg_pairs(const SdpProblem& p,
                                                         RowWorkspace& ws,
                                                         int& extended_vars) {
  const int nn_begin = p.nonneg_offset();
  const int nn_end = nn_begin + p.num_nonneg;
  std::map<int, std::vector<std::pair<int, double>>> columns;
  for (int r = 0; r < static_cast<int>(ws.rows.size()); ++r) {
    for (const auto& [col, val] : ws.rows[r]) {
      if (col >= nn_begin && col < nn_end) columns[col].emplace_back(r, val);
    }
  }
  std::map<std::vector<std::pair<int, double>>, std::pair<std::vector<int>, std::vector<int>>>
      buckets;  // sign-normalized column -> (positive-leading, negative-leading)
  for (const auto& [col, entries] : columns) {
    if (entries.empty() || p.c[col] != 0.0) continue;
    const bool flip = entries.front().second < 0.0;
    std::vector<std::pair<int, double>> key = entries;
    if (flip) {
      for (auto& [row, val] : key) val = -val;
    }
    auto& [pos, neg] = buckets[std::move(key)];
    (flip ? neg : pos).push_back(col);
  }

  std::vector<MergedNonnegPair> merges;
  for (auto& [key, lists] : buckets) {
    auto& [pos, neg] = lists;
    const size_t pairs = std::min(pos.size(), neg.size());
    for (size_t k = 0; k < pairs; ++k) {
      MergedNonnegPair m{pos[k], neg[k], extended_vars++};
      for (const auto& [row, val] : columns[m.pos]) {
        ws.rows[row][m.free_col] = val;
        ws.rows[row].erase(m.pos);
        ws.rows[row].erase(m.neg);
      }
      merges.push_back(m);
    }
  }
  return merges;
}

// Pivots out free variables (zero objective) that appear in at most two
// rows: the sparser row is folded into the other and dropped. Exact; the
// records allow exact reconstruction of both primal values and row duals.
void eliminate_doubleton_free_vars(const SdpProblem& p, RowWorkspace& ws,
                                   std::vector<Elimination>& records,
                                   int extended_vars) {
  const int free_begin = p.free_offset();
  // occurrence index, maintained incrementally for free columns only
  std::vector<std::set<int>> var_rows(extended_vars - free_begin);
  for (int r = 0; r < static_cast<int>(ws.rows.size()); ++r) {
    for (const auto& [col, val] : ws.rows[r]) {
      if (col >= free_begin) var_rows[col - free_begin].insert(r);
    }
  }

  for (int v = free_begin; v < extended_vars; ++v) {
    if (v < p.num_vars() && p.c[v] != 0.0) continue;
    std::set<int>& occ = var_rows[v - free_begin];
    if (occ.empty() || occ.size() > 2) continue;

    int r1 = *occ.begin();
    int r2 = occ.size() == 2 ? *std::next(occ.begin()) : -1;
    if (r2 >= 0 && (ws.rows[r2].size() < ws.rows[r1].size() ||
                    (ws.rows[r2].size() == ws.rows[r1].size() && r2 < r1))) {
      std::swap(r1, r2);
    }

    Elimination rec;
    rec.var = v;
    rec.row = r1;
    rec.coeff = ws.rows[r1].at(v);
    rec.rhs = ws.rhs[r1];
    for (const auto& [col, val] : ws.rows[r1]) {
      if (col != v) rec.row_entries.emplace_back(col, val);
    }
    if (r2 >= 0) rec.other_entries.emplace_back(r2, ws.rows[r2].at(v));

    if (r2 >= 0) {
      const double factor = ws.rows[r2].at(v) / rec.coeff;
      ws.rows[r2].erase(v);
      for (const auto& [col, val] : ws.rows[r1]) {
        if (col == v) continue;
        double& target = ws.rows[r2][col];
        target -= factor * val;
        const bool gone = std::abs(target) < 1e-14;
        if (gone) ws.rows[r2].erase(col);
        if (col >= free_begin) {
          if (gone) var_rows[col - free_begin].erase(r2);
          else var_rows[col - free_begin].insert(r2);
        }
      }
      ws.rhs[r2] -= factor * ws.rhs[r1];
    }
    for (const auto& [col, val] : ws.rows[r1]) {
      if (col >= free_begin) var_rows[col - free_begin].erase(r1);
    }
    ws.alive[r1] = false;
    ws.rows[r1].erase(v);  // frozen copy already taken into rec
    records.push_back(std::move(rec));
  }
}

}  // namespace

PresolveResult presolve(const SdpProblem& p) {
  p.check();
  PresolveResult out;
  out.original_vars = p.num_vars();
  out.problem.psd_dims = p.psd_dims;
  out.problem.num_nonneg = p.num_nonneg;

  RowWorkspace ws(p);
  int extended_vars = p.num_vars();
  out.merges = merge_negated_nonneg_pairs(p, ws, extended_vars);
  eliminate_doubleton_free_vars(p, ws, out.eliminations, extended_vars);

  // Pivoted columns stay in place as zero columns; merged multipliers add
  // fresh free columns at the end.
  out.problem.num_free = p.num_free + (extended_vars - p.num_vars());
  out.problem.c = Eigen::VectorXd::Zero(extended_vars);
  out.problem.c.head(p.num_vars()) = p.c;

  struct Key {
    std::vector<std::pair<int, double>> entries;  // sign/scale normalized
    bool operator<(const Key& o) const { return entries < o.entries; }
  };
  std::map<Key, std::pair<int, double>> seen;  // key -> (kept row, scaled b)

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> b_kept;
  std::vector<double> scales;
  for (int r = 0; r < static_cast<int>(ws.rows.size()); ++r) {
    if (!ws.alive[r]) continue;
    double norm2 = 0.0;
    double first = 0.0;
    for (const auto& [col, val] : ws.rows[r]) {
      if (first == 0.0 && val != 0.0) first = val;
      norm2 += val * val;
    }
    double norm = std::sqrt(norm2);
    if (norm < 1e-14) {
      if (std::abs(ws.rhs[r]) > 1e-10) {
        out.infeasible = true;
        out.message = "zero equality row " + std::to_string(r) +
                      " with nonzero right-hand side";
        return out;
      }
      ++out.removed_zero_rows;
      continue;
    }
    if (std::abs(norm - 1.0) < 1e-12) norm = 1.0;  // keep presolve idempotent
    const double sign = first < 0.0 ? -1.0 : 1.0;
    Key key;
    for (const auto& [col, val] : ws.rows[r]) {
      if (val != 0.0) key.entries.emplace_back(col, sign * val / norm);
    }
    const double b_normalized = sign * ws.rhs[r] / norm;
    auto [at, inserted] = seen.try_emplace(key, static_cast<int>(b_kept.size()),
                                           b_normalized);
    if (!inserted) {
      if (std::abs(at->second.second - b_normalized) > 1e-10) {
        out.infeasible = true;
        out.message = "contradictory duplicate of equality row " + std::to_string(r);
        return out;
      }
      ++out.removed_duplicates;
      continue;
    }
    const int new_row = static_cast<int>(b_kept.size());
    for (const auto& [col, val] : ws.rows[r]) {
      triplets.emplace_back(new_row, col, val / norm);
    }
    b_kept.push_back(ws.rhs[r] / norm);
    scales.push_back(norm);
    out.kept_rows.push_back(r);
  }

  out.problem.A.resize(static_cast<int>(b_kept.size()), extended_vars);
  out.problem.A.setFromTriplets(triplets.begin(), triplets.end());
  out.problem.b = Eigen::Map<Eigen::VectorXd>(b_kept.data(), b_kept.size());
  out.row_scale = Eigen::Map<Eigen::VectorXd>(scales.data(), scales.size());
  return out;
}

void postsolve(const PresolveResult& pre, ConicSolution& sol) {
  // Records undo in reverse: each dropped row's dual follows from exact dual
  // feasibility on its pivot variable, and each pivot value from the frozen
  // row. Chained references always point at rows or variables restored by a
  // later (already processed) record.
  for (auto it = pre.eliminations.rbegin(); it != pre.eliminations.rend(); ++it) {
    const Elimination& e = *it;
    double dual = 0.0;
    for (const auto& [row, coeff] : e.other_entries) dual -= coeff * sol.y[row];
    sol.y[e.row] = dual / e.coeff;
    double value = e.rhs;
    for (const auto& [col, coeff] : e.row_entries) value -= coeff * sol.v[col];
    sol.v[e.var] = value / e.coeff;
  }
}

namespace {

// Projection onto the product cone (PSD blocks, nonnegatives, free).
class ConeProjector {
 public:
  explicit ConeProjector(const SdpProblem& p) : p_(p) {}

  void project(Eigen::VectorXd& v) const {
    int off = 0;
    for (int d : p_.psd_dims) {
      auto seg = v.segment(off, svec_size(d));
      Eigen::MatrixXd m = svec_to_matrix(seg, d);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      m.noalias() = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      seg = matrix_to_svec(m);
      off += svec_size(d);
    }
    if (p_.num_nonneg > 0) {
      v.segment(off, p_.num_nonneg) = v.segment(off, p_.num_nonneg).cwiseMax(0.0);
    }
    // free segment untouched
  }

 private:
  const SdpProblem& p_;
};

ConicSolution solve_admm(const SdpProblem& p, const SolverConfig& config) {
  ConicSolution sol;
  const int n = p.num_vars();
  const int m = p.num_rows();
  const double alpha = config.over_relaxation;
  double rho = config.penalty;

  Eigen::SparseMatrix<double> At = p.A.transpose();
  Eigen::SparseMatrix<double> gram = p.A * At;
  // Tiny ridge keeps the factorization well-posed if rows are near-dependent;
  // rows are unit-norm after presolve so the bias is ~1e-12.
  for (int r = 0; r < m; ++r) gram.coeffRef(r, r) += 1e-12;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  if (m > 0) {
    ldlt.compute(gram);
    if (ldlt.info() != Eigen::Success) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "equality Gram factorization failed";
      return sol;
    }
  }

  ConeProjector cone(p);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x(n), w(n), xh(n), mu(m);
  const double b_norm = 1.0 + p.b.norm();
  const double c_norm = 1.0 + p.c.norm();

  auto x_step = [&](void) {
    w = z - u + p.c / rho;
    if (m > 0) {
      mu = ldlt.solve(p.A * w - p.b);
      x = w - At * mu;
    } else {
      mu.resize(0);
      x = w;
    }
  };

  int iter = 0;
  double pres = 0.0, dres = 0.0, gap = 0.0;
  bool converged = false;
  for (iter = 1; iter <= config.max_iter; ++iter) {
    x_step();
    xh = alpha * x + (1.0 - alpha) * z;
    z = xh + u;
    cone.project(z);
    u += xh - z;

    if (iter % config.check_interval != 0 && iter != config.max_iter) continue;

    Eigen::VectorXd y = (m > 0) ? Eigen::VectorXd(-rho * mu) : Eigen::VectorXd(0);
    Eigen::VectorXd s = -rho * u;
    pres = (m > 0) ? (p.A * z - p.b).norm() / b_norm : 0.0;
    Eigen::VectorXd dres_vec = -p.c - At * y - s;
    dres = dres_vec.norm() / c_norm;
    const double pobj = p.c.dot(z);
    const double dobj = (m > 0) ? -p.b.dot(y) : 0.0;
    gap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));

    if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(gap)) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "non-finite iterate at iteration " + std::to_string(iter);
      sol.iterations = iter;
      return sol;
    }
    if (config.verbose && iter % (config.check_interval * 40) == 0) {
      std::ostringstream os;
      os << "iter " << iter << " pres " << pres << " dres " << dres << " gap "
         << gap << " rho " << rho;
      sol.message = os.str();
    }

    if (pres <= config.tol && dres <= config.tol && gap <= config.tol) {
      sol.status = SolveStatus::kOptimal;
      converged = true;
    } else if (iter == config.max_iter) {
      const double worst = std::max({pres, dres, gap});
      sol.status = worst <= 100.0 * config.tol ? SolveStatus::kNearOptimal
                                               : SolveStatus::kMaxIter;
      sol.message = "stopped at max_iter with worst residual " + std::to_string(worst);
    } else {
      if (config.adaptive_penalty) {
        // Residual balancing; the affine projection does not depend on rho,
        // so retuning is free apart from rescaling the dual iterate.
        double factor = 1.0;
        if (pres > 10.0 * dres) factor = 2.0;
        else if (dres > 10.0 * pres) factor = 0.5;
        if (factor != 1.0) {
          const double new_rho = std::clamp(rho * factor, 1e-6, 1e8);
          if (new_rho != rho) {
            u *= rho / new_rho;
            rho = new_rho;
          }
        }
      }
      continue;
    }

    sol.v = z;
    sol.y = y;
    sol.s = s;
    sol.objective = pobj;
    sol.dual_objective = dobj;
    sol.iterations = iter;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.rel_gap = gap;
    return sol;
  }

  // max_iter fell on a non-check iteration (cannot happen, but stay safe).
  sol.status = SolveStatus::kMaxIter;
  sol.iterations = config.max_iter;
  (void)converged;
  return sol;
}

}  // namespace

ConicSolution solve(const SdpProblem& p, const SolverConfig& config) {
  PresolveResult pre = presolve(p);
  if (pre.infeasible) {
    ConicSolution sol;
    sol.status = SolveStatus::kInfeasibleDetected;
    sol.message = pre.message;
    return sol;
  }
  SdpProblem reduced = config.scaling ? std::move(pre.problem) : p;

  // The feasible set {Av = b} scales linearly in b while the cone and the
  // duals do not, so normalizing b balances the splitting for free: solve
  // with b / sigma, then stretch the primal back.
  double sigma = 1.0;
  if (config.scaling && reduced.b.size() > 0) {
    sigma = std::max(1.0, reduced.b.cwiseAbs().maxCoeff());
    reduced.b /= sigma;
  }

  ConicSolution sol = (config.backend == SolverBackend::kInteriorPoint)
                          ? solve_interior_point(reduced, config)
                          : solve_admm(reduced, config);
  if (sigma != 1.0 && sol.v.size() > 0) {
    sol.v *= sigma;
    sol.objective *= sigma;
    sol.dual_objective *= sigma;
  }
  if (config.scaling && sol.y.size() == reduced.num_rows() && sol.v.size() > 0) {
    // Expand duals to the original row numbering: y_orig = y_scaled / norm.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(p.num_rows());
    for (int r = 0; r < reduced.num_rows(); ++r) {
      y[pre.kept_rows[r]] = sol.y[r] / pre.row_scale[r];
    }
    sol.y = std::move(y);
    postsolve(pre, sol);
    for (const MergedNonnegPair& m : pre.merges) {
      sol.v[m.pos] = std::max(sol.v[m.free_col], 0.0);
      sol.v[m.neg] = std::max(-sol.v[m.free_col], 0.0);
    }
    sol.v.conservativeResize(p.num_vars());
    sol.s = -p.c - p.A.transpose() * sol.y;
    sol.objective = p.c.dot(sol.v);
  }
  return sol;
}

}  // namespace sbsos
