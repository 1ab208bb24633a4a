#include "sbsos/extract.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sbsos {

std::vector<MomentBlock> extract_moments(const ConicSolution& solution,
                                         const Assembly& assembly,
                                         double leading_tol) {
  if (solution.y.size() != assembly.sdp.num_rows()) {
    throw std::invalid_argument("solution duals do not match the assembly");
  }
  std::vector<MomentBlock> out;
  out.reserve(assembly.blocks.size());
  for (const BlockAssembly& ba : assembly.blocks) {
    const int nb = static_cast<int>(ba.basis_vars.size()) + 1;
    std::vector<Monomial> basis;
    basis.push_back(Monomial{});
    for (VarId v : ba.basis_vars) basis.push_back(Monomial::var(v));

    MomentBlock mb;
    mb.basis_vars = ba.basis_vars;
    mb.M.resize(nb, nb);
    for (int a = 0; a < nb; ++a) {
      for (int b = a; b < nb; ++b) {
        const int idx = ba.monomial_index(basis[a] * basis[b]);
        if (idx < 0) throw std::logic_error("basis product missing from block");
        const double moment = solution.y[ba.eq_row_offset + idx];
        mb.M(a, b) = moment;
        mb.M(b, a) = moment;
      }
    }
    mb.leading = mb.M(0, 0);
    if (!(mb.leading > leading_tol)) {
      throw std::runtime_error(
          "moment extraction failed: degenerate dual (leading entry " +
          std::to_string(mb.leading) + ")");
    }
    mb.M /= mb.leading;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mb.M);
    const Eigen::VectorXd ev = es.eigenvalues();
    mb.min_eigenvalue = ev.minCoeff();
    mb.psd_violation = mb.min_eigenvalue < -leading_tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Eigen::VectorXd sv = ev.cwiseAbs();
    std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
    mb.rank_ratio = sv[0] > 0.0 && nb > 1 ? sv[1] / sv[0] : 0.0;
    out.push_back(std::move(mb));
  }
  return out;
}

RecoveredAssignment recover_assignment(const std::vector<MomentBlock>& moments,
                                       const VariableIndex& index, int anchor) {
  RecoveredAssignment out;
  std::map<VarId, std::pair<double, int>> sums;  // value sum, block count
  std::map<VarId, std::pair<double, double>> ranges;
  for (const MomentBlock& mb : moments) {
    for (size_t k = 0; k < mb.basis_vars.size(); ++k) {
      const double value = mb.M(0, static_cast<int>(k) + 1);
      auto& [sum, count] = sums[mb.basis_vars[k]];
      sum += value;
      ++count;
      auto it = ranges.find(mb.basis_vars[k]);
      if (it == ranges.end()) {
        ranges.emplace(mb.basis_vars[k], std::make_pair(value, value));
      } else {
        it->second.first = std::min(it->second.first, value);
        it->second.second = std::max(it->second.second, value);
      }
    }
  }
  for (const auto& [v, range] : ranges) {
    out.moment_spread = std::max(out.moment_spread, range.second - range.first);
  }

  auto value_of = [&](VarId v) {
    auto it = sums.find(v);
    if (it == sums.end()) {
      out.flags.push_back("variable " + index.describe(v) +
                          " not covered by any moment block");
      return 0.0;
    }
    return it->second.first / it->second.second;
  };

  Assignment& a = out.assignment;
  a.poses.resize(index.num_poses());
  a.landmarks.resize(index.num_landmarks());
  for (int i = 0; i < index.num_poses(); ++i) {
    if (i == anchor) {
      a.poses[i] = Pose2::identity();
      continue;
    }
    Pose2 p;
    p.c = value_of(index.c(i));
    p.s = value_of(index.s(i));
    p.x = value_of(index.x(i));
    p.y = value_of(index.y(i));
    const double norm = std::hypot(p.c, p.s);
    if (norm < 1e-6) {
      out.flags.push_back("rotation of pose " + std::to_string(i) +
                          " degenerate; defaulted to identity");
      p.c = 1.0;
      p.s = 0.0;
    } else {
      p.c /= norm;
      p.s /= norm;
    }
    a.poses[i] = p;
  }
  for (int l = 0; l < index.num_landmarks(); ++l) {
    a.landmarks[l] = {value_of(index.lx(l)), value_of(index.ly(l))};
  }
  return out;
}

Certificate certify(const FactorGraph& g, const Assignment& estimate,
                    double lower_bound, const std::vector<MomentBlock>& moments,
                    double eps_cert, double rank_tol) {
  Certificate cert;
  cert.lower_bound = lower_bound;
  cert.achieved_cost = total_cost(g, estimate);
  cert.relative_gap = (cert.achieved_cost - lower_bound) /
                      std::max(1.0, std::abs(lower_bound));
  for (const MomentBlock& mb : moments) {
    cert.rank_ratios.push_back(mb.rank_ratio);
    cert.max_rank_ratio = std::max(cert.max_rank_ratio, mb.rank_ratio);
  }
  cert.certified = cert.relative_gap <= eps_cert && cert.max_rank_ratio <= rank_tol;
  cert.verdict = cert.certified ? "certified-optimal" : "uncertified";
  return cert;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string Certificate::to_json() const {
  std::ostringstream os;
  os << "{\"lower_bound\":" << fmt(lower_bound)
     << ",\"achieved_cost\":" << fmt(achieved_cost)
     << ",\"relative_gap\":" << fmt(relative_gap)
     << ",\"max_rank_ratio\":" << fmt(max_rank_ratio) << ",\"rank_ratios\":[";
  for (size_t i = 0; i < rank_ratios.size(); ++i) {
    os << (i ? "," : "") << fmt(rank_ratios[i]);
  }
  os << "],\"moment_spread\":" << fmt(moment_spread)
     << ",\"certified\":" << (certified ? "true" : "false") << ",\"verdict\":\""
     << verdict << "\"}";
  return os.str();
}

}  // namespace sbsos
