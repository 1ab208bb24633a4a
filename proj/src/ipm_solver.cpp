#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sbsos/sdp_solver.hpp"

// Dense Nesterov-Todd primal-dual path-following solver. Small problems
// only: every matrix is dense and the Schur complement is formed explicitly.
// Free variables ride along in an augmented KKT system (they carry no cone
// constraint, so their dual slack is pinned to zero).

namespace sbsos {

namespace {

struct BlockView {
  int dim;
  int offset;  // into the cone coordinate vector (svec layout)
};

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d[i] = 1.0 / std::sqrt(std::max(d[i], 1e-300));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Largest step alpha <= 1 with M + alpha * D staying positive definite.
double max_psd_step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& d) {
  const Eigen::MatrixXd mis = sym_inv_sqrt(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mis * d * mis);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min >= 0.0) return 1.0;
  return std::min(1.0, -1.0 / lambda_min);
}

double max_nonneg_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double alpha = 1.0;
  for (int i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) alpha = std::min(alpha, -x[i] / dx[i]);
  }
  return alpha;
}

}  // namespace

ConicSolution solve_interior_point(const SdpProblem& p, const SolverConfig& config) {
  p.check();
  ConicSolution sol;

  const int m = p.num_rows();
  const int n_cone = p.psd_var_count() + p.num_nonneg;
  const int n_free = p.num_free;
  const int nn_off = p.psd_var_count();

  std::vector<BlockView> blocks;
  {
    int off = 0;
    for (int d : p.psd_dims) {
      blocks.push_back({d, off});
      off += svec_size(d);
    }
  }

  const Eigen::MatrixXd A = Eigen::MatrixXd(p.A);
  const Eigen::MatrixXd Ac = A.leftCols(n_cone);
  const Eigen::MatrixXd Af = A.rightCols(n_free);
  const Eigen::VectorXd cp = -p.c;  // minimize form
  const Eigen::VectorXd cpc = cp.head(n_cone);
  const Eigen::VectorXd cpf = cp.tail(n_free);

  int nu = p.num_nonneg;
  for (int d : p.psd_dims) nu += d;
  if (nu == 0) {
    sol.status = SolveStatus::kNumericalFailure;
    sol.message = "interior-point backend needs at least one cone variable";
    return sol;
  }

  const double tau_p = std::max(1.0, p.b.size() ? p.b.cwiseAbs().maxCoeff() : 1.0);
  const double tau_d = std::max(1.0, cp.cwiseAbs().maxCoeff());
  Eigen::VectorXd xc = Eigen::VectorXd::Zero(n_cone);
  Eigen::VectorXd sc = Eigen::VectorXd::Zero(n_cone);
  for (const BlockView& bv : blocks) {
    for (int i = 0; i < bv.dim; ++i) {
      xc[bv.offset + svec_index(i, i)] = tau_p;
      sc[bv.offset + svec_index(i, i)] = tau_d;
    }
  }
  xc.segment(nn_off, p.num_nonneg).setConstant(tau_p);
  sc.segment(nn_off, p.num_nonneg).setConstant(tau_d);
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(n_free);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  const double b_norm = 1.0 + p.b.norm();
  const double c_norm = 1.0 + cp.norm();
  const int max_iter = std::min(config.max_iter, 200);

  auto apply_scaling = [&](const std::vector<Eigen::MatrixXd>& W,
                           const Eigen::VectorXd& w2,
                           const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd out(n_cone);
    for (size_t k = 0; k < blocks.size(); ++k) {
      const BlockView& bv = blocks[k];
      const Eigen::MatrixXd Vm =
          svec_to_matrix(v.segment(bv.offset, svec_size(bv.dim)), bv.dim);
      out.segment(bv.offset, svec_size(bv.dim)) =
          matrix_to_svec(W[k] * Vm * W[k]);
    }
    out.segment(nn_off, p.num_nonneg) =
        w2.cwiseProduct(v.segment(nn_off, p.num_nonneg));
    return out;
  };

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::VectorXd rp = p.b - Ac * xc - Af * xf;
    const Eigen::VectorXd rdc = cpc - Ac.transpose() * y - sc;
    const Eigen::VectorXd rdf = cpf - Af.transpose() * y;
    const double mu = xc.dot(sc) / nu;

    const double pobj_min = cp.dot((Eigen::VectorXd(n_cone + n_free) << xc, xf).finished());
    const double dobj_min = p.b.dot(y);
    const double pres = rp.norm() / b_norm;
    const double dres = std::sqrt(rdc.squaredNorm() + rdf.squaredNorm()) / c_norm;
    const double gap = std::abs(pobj_min - dobj_min) / (1.0 + std::abs(pobj_min));

    sol.iterations = iter - 1;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.rel_gap = gap;
    if (pres <= config.tol && dres <= config.tol && gap <= config.tol) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    if (iter == max_iter) {
      sol.status = (std::max({pres, dres, gap}) <= 100.0 * config.tol)
                       ? SolveStatus::kNearOptimal
                       : SolveStatus::kMaxIter;
      break;
    }

    // Nesterov-Todd scaling point per block, W S W = X.
    std::vector<Eigen::MatrixXd> W(blocks.size());
    std::vector<Eigen::MatrixXd> Xm(blocks.size()), Sinv(blocks.size());
    for (size_t k = 0; k < blocks.size(); ++k) {
      const BlockView& bv = blocks[k];
      Xm[k] = svec_to_matrix(xc.segment(bv.offset, svec_size(bv.dim)), bv.dim);
      const Eigen::MatrixXd Sm =
          svec_to_matrix(sc.segment(bv.offset, svec_size(bv.dim)), bv.dim);
      const Eigen::MatrixXd s_half = sym_sqrt(Sm);
      const Eigen::MatrixXd s_inv_half = sym_inv_sqrt(Sm);
      W[k] = s_inv_half * sym_sqrt(s_half * Xm[k] * s_half) * s_inv_half;
      Sinv[k] = s_inv_half * s_inv_half;
    }
    const Eigen::VectorXd xn = xc.segment(nn_off, p.num_nonneg);
    const Eigen::VectorXd sn = sc.segment(nn_off, p.num_nonneg);
    const Eigen::VectorXd w2 = xn.cwiseQuotient(sn);

    // Schur complement M = Ac D Ac' with D v = W v W (blocks), w2 .* v (lp).
    Eigen::MatrixXd DAt(n_cone, m);
    for (int r = 0; r < m; ++r) {
      DAt.col(r) = apply_scaling(W, w2, Ac.row(r).transpose());
    }
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + n_free, m + n_free);
    kkt.topLeftCorner(m, m) = Ac * DAt;
    kkt.topRightCorner(m, n_free) = Af;
    kkt.bottomLeftCorner(n_free, m) = Af.transpose();
    kkt.topLeftCorner(m, m).diagonal().array() += 1e-12;
    kkt.bottomRightCorner(n_free, n_free).diagonal().array() -= 1e-12;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);

    auto solve_direction = [&](double sigma_mu, Eigen::VectorXd& dxc,
                               Eigen::VectorXd& dxf, Eigen::VectorXd& dy,
                               Eigen::VectorXd& dsc) {
      // Complementarity target in the scaled linearization:
      //   dx + W ds W = sigma*mu*S^{-1} - X.
      Eigen::VectorXd R(n_cone);
      for (size_t k = 0; k < blocks.size(); ++k) {
        const BlockView& bv = blocks[k];
        R.segment(bv.offset, svec_size(bv.dim)) =
            matrix_to_svec(sigma_mu * Sinv[k] - Xm[k]);
      }
      for (int i = 0; i < p.num_nonneg; ++i) {
        R[nn_off + i] = sigma_mu / sn[i] - xn[i];
      }
      Eigen::VectorXd rhs(m + n_free);
      rhs.head(m) = rp - Ac * (R - apply_scaling(W, w2, rdc));
      rhs.tail(n_free) = rdf;
      const Eigen::VectorXd sol_vec = lu.solve(rhs);
      dy = sol_vec.head(m);
      dxf = sol_vec.tail(n_free);
      dsc = rdc - Ac.transpose() * dy;
      dxc = R - apply_scaling(W, w2, dsc);
    };

    Eigen::VectorXd dxc, dxf, dy, dsc;
    solve_direction(0.0, dxc, dxf, dy, dsc);

    auto step_lengths = [&](const Eigen::VectorXd& dxc_, const Eigen::VectorXd& dsc_) {
      double ap = 1.0, ad = 1.0;
      for (size_t k = 0; k < blocks.size(); ++k) {
        const BlockView& bv = blocks[k];
        const Eigen::MatrixXd Dx =
            svec_to_matrix(dxc_.segment(bv.offset, svec_size(bv.dim)), bv.dim);
        const Eigen::MatrixXd Sm =
            svec_to_matrix(sc.segment(bv.offset, svec_size(bv.dim)), bv.dim);
        const Eigen::MatrixXd Ds =
            svec_to_matrix(dsc_.segment(bv.offset, svec_size(bv.dim)), bv.dim);
        ap = std::min(ap, max_psd_step(Xm[k], Dx));
        ad = std::min(ad, max_psd_step(Sm, Ds));
      }
      ap = std::min(ap, max_nonneg_step(xn, dxc_.segment(nn_off, p.num_nonneg)));
      ad = std::min(ad, max_nonneg_step(sn, dsc_.segment(nn_off, p.num_nonneg)));
      return std::pair<double, double>(ap, ad);
    };

    auto [ap_aff, ad_aff] = step_lengths(dxc, dsc);
    const double gap_aff =
        (xc + ap_aff * dxc).dot(sc + ad_aff * dsc) / nu;
    double sigma = std::pow(std::clamp(gap_aff / mu, 0.0, 1.0), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.99);

    solve_direction(sigma * mu, dxc, dxf, dy, dsc);
    auto [ap, ad] = step_lengths(dxc, dsc);
    const double shrink = 0.98;
    xc += shrink * ap * dxc;
    xf += shrink * ap * dxf;
    y += shrink * ad * dy;
    sc += shrink * ad * dsc;

    if (!xc.allFinite() || !sc.allFinite() || !y.allFinite()) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "non-finite interior-point iterate";
      sol.iterations = iter;
      return sol;
    }
  }

  Eigen::VectorXd v(n_cone + n_free);
  v << xc, xf;
  sol.v = v;
  sol.y = y;
  Eigen::VectorXd s_full = Eigen::VectorXd::Zero(n_cone + n_free);
  s_full.head(n_cone) = sc;
  sol.s = s_full;
  sol.objective = p.c.dot(v);
  sol.dual_objective = -p.b.dot(y);
  return sol;
}

}  // namespace sbsos
