#include "sbsos/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbsos {

GaugeReduced apply_gauge(const std::vector<Polynomial>& cost_terms,
                         const std::vector<ConstraintPoly>& constraints,
                         int anchor, const VariableIndex& index) {
  if (anchor < 0 || anchor >= index.num_poses()) {
    throw std::invalid_argument("gauge anchor pose out of range");
  }
  GaugeReduced out;
  out.cost_terms.reserve(cost_terms.size());
  for (const Polynomial& term : cost_terms) {
    Polynomial reduced = term.substitute(index.c(anchor), 1.0);
    reduced = reduced.substitute(index.s(anchor), 0.0);
    reduced = reduced.substitute(index.x(anchor), 0.0);
    reduced = reduced.substitute(index.y(anchor), 0.0);
    out.cost_terms.push_back(std::move(reduced));
  }
  for (const ConstraintPoly& c : constraints) {
    if (c.pose != anchor) out.constraints.push_back(c);
  }
  return out;
}

std::vector<Monomial> monomial_basis(const Block& block) {
  if (block.vars.empty()) {
    throw std::invalid_argument("monomial basis of an empty block");
  }
  std::vector<Monomial> basis;
  basis.reserve(block.vars.size() + 1);
  basis.push_back(Monomial{});
  for (VarId v : block.vars) basis.push_back(Monomial::var(v));
  return basis;
}

namespace {

// Products with exponents summing to exactly `remaining` over the slots from
// `slot` onward, emitted in slot-lexicographic order.
void enumerate_exact_degree(const std::vector<Polynomial>& slots, size_t slot,
                            int remaining, const Polynomial& acc,
                            std::vector<Polynomial>& out) {
  if (slot == slots.size()) {
    if (remaining == 0) out.push_back(acc);
    return;
  }
  Polynomial power = acc;
  for (int e = 0; e <= remaining; ++e) {
    if (e > 0) power = power * slots[slot];
    enumerate_exact_degree(slots, slot + 1, remaining - e, power, out);
  }
}

}  // namespace

std::vector<Polynomial> build_multiplier_polys(
    const Block& block, const std::vector<ConstraintPoly>& constraints, int d) {
  if (d < 1) throw std::invalid_argument("multiplier degree d must be >= 1");
  std::vector<Polynomial> slots;
  for (int j : block.constraints) {
    const Polynomial& g = constraints.at(j).g;
    slots.push_back(g);
    slots.push_back(Polynomial(1.0) - g);
  }
  std::vector<Polynomial> out;
  if (d == 1) {  // [1, g_j, 1-g_j, ...] in J order
    out.push_back(Polynomial(1.0));
    for (const Polynomial& s : slots) out.push_back(s);
    return out;
  }
  // Generic path: total degree ascending, then slot-lexicographic.
  for (int total = 0; total <= d; ++total) {
    enumerate_exact_degree(slots, 0, total, Polynomial(1.0), out);
  }
  return out;
}

int BlockAssembly::monomial_index(const Monomial& m) const {
  const auto it = std::lower_bound(monomials.begin(), monomials.end(), m);
  if (it == monomials.end() || !(*it == m)) return -1;
  return static_cast<int>(it - monomials.begin());
}

Assembly assemble(const std::vector<Polynomial>& cost_terms,
                  const std::vector<ConstraintPoly>& constraints,
                  const Decomposition& decomposition,
                  const RelaxationParams& params) {
  if (params.k != 1) {
    throw std::invalid_argument("only the k = 1 SOS degree bound is assembled");
  }
  if (!validate_rip(decomposition, cost_terms, constraints)) {
    throw std::invalid_argument("decomposition fails the running intersection check");
  }
  for (const Polynomial& t : cost_terms) {
    if (t.degree() > 2) {
      throw std::invalid_argument(
          "cost term of degree > 2 cannot be represented at k = 1");
    }
  }

  Assembly out;
  for (const Polynomial& t : cost_terms) out.objective_poly += t;

  const double sqrt2 = std::sqrt(2.0);
  const int p = static_cast<int>(decomposition.blocks.size());
  out.blocks.resize(p);

  // Variable layout: [svec(Q_l)...][lambda_l...][t, f_l coefficients...].
  int q_cursor = 0;
  for (int l = 0; l < p; ++l) {
    BlockAssembly& ba = out.blocks[l];
    ba.basis_vars = decomposition.blocks[l].vars;
    const int nb = static_cast<int>(ba.basis_vars.size()) + 1;
    ba.q_offset = q_cursor;
    q_cursor += svec_size(nb);
    out.sdp.psd_dims.push_back(nb);

    // All degree-<=2 monomials over the block: pairwise basis products.
    const std::vector<Monomial> basis = monomial_basis(decomposition.blocks[l]);
    for (int a = 0; a < nb; ++a) {
      for (int b = a; b < nb; ++b) ba.monomials.push_back(basis[a] * basis[b]);
    }
    std::sort(ba.monomials.begin(), ba.monomials.end());
    ba.monomials.erase(std::unique(ba.monomials.begin(), ba.monomials.end()),
                       ba.monomials.end());
    if (static_cast<int>(ba.monomials.size()) != svec_size(nb)) {
      throw std::logic_error("basis products are not distinct");
    }
  }

  std::vector<std::vector<Polynomial>> multipliers(p);
  int lambda_cursor = q_cursor;
  for (int l = 0; l < p; ++l) {
    multipliers[l] =
        build_multiplier_polys(decomposition.blocks[l], constraints, params.d);
    for (const Polynomial& h : multipliers[l]) {
      if (h.degree() > 2) {
        throw std::invalid_argument(
            "multiplier product of degree > 2 at d = " + std::to_string(params.d) +
            " requires an SOS degree bound k > 1");
      }
    }
    out.blocks[l].lambda_offset = lambda_cursor;
    out.blocks[l].lambda_count = static_cast<int>(multipliers[l].size());
    lambda_cursor += out.blocks[l].lambda_count;
  }
  out.sdp.num_nonneg = lambda_cursor - q_cursor;

  const int free_base = lambda_cursor;
  out.t_var_index = free_base;
  int free_cursor = free_base + 1;
  for (int l = 0; l < p; ++l) {
    out.blocks[l].f_offset = free_cursor;
    free_cursor += static_cast<int>(out.blocks[l].monomials.size());
  }
  out.sdp.num_free = free_cursor - free_base;
  const int num_vars = free_cursor;

  // Global monomial list: union of the per-block lists.
  for (const BlockAssembly& ba : out.blocks) {
    out.global_monomials.insert(out.global_monomials.end(), ba.monomials.begin(),
                                ba.monomials.end());
  }
  std::sort(out.global_monomials.begin(), out.global_monomials.end());
  out.global_monomials.erase(
      std::unique(out.global_monomials.begin(), out.global_monomials.end()),
      out.global_monomials.end());
  for (const auto& [m, coeff] : out.objective_poly.terms()) {
    const bool representable = std::binary_search(out.global_monomials.begin(),
                                                  out.global_monomials.end(), m);
    if (!representable) {
      throw std::logic_error("cost monomial " + m.to_string() +
                             " not representable by any block");
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> rhs;

  // Per-block coefficient matching: f_l - h_l - sigma_l = 0, one equality per
  // block monomial. sigma contributes through svec(Q): the (a, b) basis pair
  // with m_a * m_b == m, entry 1 on the diagonal and sqrt(2) off it.
  for (int l = 0; l < p; ++l) {
    BlockAssembly& ba = out.blocks[l];
    ba.eq_row_offset = static_cast<int>(rhs.size());
    const int nb = static_cast<int>(ba.basis_vars.size()) + 1;
    const std::vector<Monomial> basis = monomial_basis(decomposition.blocks[l]);

    std::vector<std::vector<std::pair<int, double>>> row_entries(ba.monomials.size());
    for (int a = 0; a < nb; ++a) {
      for (int b = a; b < nb; ++b) {
        const int idx = ba.monomial_index(basis[a] * basis[b]);
        row_entries[idx].emplace_back(ba.q_offset + svec_index(a, b),
                                      a == b ? -1.0 : -sqrt2);
      }
    }
    for (int r = 0; r < static_cast<int>(multipliers[l].size()); ++r) {
      for (const auto& [m, coeff] : multipliers[l][r].terms()) {
        const int idx = ba.monomial_index(m);
        if (idx < 0) {
          throw std::logic_error("multiplier monomial outside block span");
        }
        row_entries[idx].emplace_back(ba.lambda_offset + r, -coeff);
      }
    }
    for (size_t idx = 0; idx < ba.monomials.size(); ++idx) {
      const int row = static_cast<int>(rhs.size());
      triplets.emplace_back(row, ba.f_offset + static_cast<int>(idx), 1.0);
      for (const auto& [col, val] : row_entries[idx]) {
        triplets.emplace_back(row, col, val);
      }
      rhs.push_back(0.0);
    }
  }

  // Global matching: sum_l f_l(m) (+ t when m == 1) = f(m).
  out.global_row_offset = static_cast<int>(rhs.size());
  for (const Monomial& m : out.global_monomials) {
    const int row = static_cast<int>(rhs.size());
    for (int l = 0; l < p; ++l) {
      const int idx = out.blocks[l].monomial_index(m);
      if (idx >= 0) {
        triplets.emplace_back(row, out.blocks[l].f_offset + idx, 1.0);
      }
    }
    if (m.is_constant()) triplets.emplace_back(row, out.t_var_index, 1.0);
    rhs.push_back(out.objective_poly.coeff(m));
  }

  out.sdp.A.resize(static_cast<int>(rhs.size()), num_vars);
  out.sdp.A.setFromTriplets(triplets.begin(), triplets.end());
  out.sdp.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), rhs.size());
  out.sdp.c = Eigen::VectorXd::Zero(num_vars);
  out.sdp.c[out.t_var_index] = 1.0;  // maximize the lower bound
  out.sdp.check();
  return out;
}

}  // namespace sbsos
