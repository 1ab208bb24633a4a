#include "sbsos/sdp_problem.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sbsos {

int svec_size(int n) { return n * (n + 1) / 2; }

int svec_index(int a, int b) {
  if (a > b) std::swap(a, b);
  return b * (b + 1) / 2 + a;
}

Eigen::MatrixXd svec_to_matrix(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  Eigen::MatrixXd m(n, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a <= b; ++a) {
      const double val = v[svec_index(a, b)];
      if (a == b) {
        m(a, a) = val;
      } else {
        m(a, b) = val * inv_sqrt2;
        m(b, a) = val * inv_sqrt2;
      }
    }
  }
  return m;
}

Eigen::VectorXd matrix_to_svec(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_size(n));
  const double sqrt2 = std::sqrt(2.0);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a <= b; ++a) {
      v[svec_index(a, b)] = (a == b) ? m(a, a) : 0.5 * (m(a, b) + m(b, a)) * sqrt2;
    }
  }
  return v;
}

int SdpProblem::psd_var_count() const {
  int total = 0;
  for (int d : psd_dims) total += svec_size(d);
  return total;
}

int SdpProblem::psd_offset(int block) const {
  int off = 0;
  for (int k = 0; k < block; ++k) off += svec_size(psd_dims[k]);
  return off;
}

int SdpProblem::num_vars() const {
  return psd_var_count() + num_nonneg + num_free;
}

void SdpProblem::check() const {
  if (A.rows() != b.size()) throw std::invalid_argument("A/b row mismatch");
  if (A.cols() != num_vars()) throw std::invalid_argument("A column mismatch");
  if (c.size() != num_vars()) throw std::invalid_argument("c size mismatch");
  for (int d : psd_dims) {
    if (d <= 0) throw std::invalid_argument("non-positive PSD dimension");
  }
  if (num_nonneg < 0 || num_free < 0) {
    throw std::invalid_argument("negative variable count");
  }
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string SdpProblem::to_text() const {
  std::ostringstream os;
  os << "SBSOS-SDP 1\n";
  os << "psd " << psd_dims.size();
  for (int d : psd_dims) os << " " << d;
  os << "\nnonneg " << num_nonneg << "\nfree " << num_free << "\n";
  os << "objective";
  for (int i = 0; i < c.size(); ++i) {
    if (c[i] != 0.0) os << " " << i << " " << fmt(c[i]);
  }
  os << "\nrows " << num_rows() << "\n";
  for (int r = 0; r < num_rows(); ++r) os << "b " << r << " " << fmt(b[r]) << "\n";
  for (int col = 0; col < A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      os << "a " << it.row() << " " << it.col() << " " << fmt(it.value()) << "\n";
    }
  }
  return os.str();
}

SdpProblem SdpProblem::from_text(const std::string& text) {
  SdpProblem p;
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "SBSOS-SDP" || version != 1) {
    throw std::runtime_error("bad SDP text header");
  }
  int num_psd = 0;
  if (!(in >> tag >> num_psd) || tag != "psd") throw std::runtime_error("bad psd line");
  p.psd_dims.resize(num_psd);
  for (int& d : p.psd_dims) in >> d;
  if (!(in >> tag >> p.num_nonneg) || tag != "nonneg") throw std::runtime_error("bad nonneg line");
  if (!(in >> tag >> p.num_free) || tag != "free") throw std::runtime_error("bad free line");
  p.c = Eigen::VectorXd::Zero(p.num_vars());
  if (!(in >> tag) || tag != "objective") throw std::runtime_error("bad objective line");
  std::vector<Eigen::Triplet<double>> triplets;
  int rows = -1;
  while (in >> tag) {
    if (tag == "rows") {
      in >> rows;
      p.b = Eigen::VectorXd::Zero(rows);
    } else if (tag == "b") {
      int r;
      double v;
      in >> r >> v;
      p.b[r] = v;
    } else if (tag == "a") {
      int r, col;
      double v;
      in >> r >> col >> v;
      triplets.emplace_back(r, col, v);
    } else {  // objective entries come before "rows"
      const int idx = std::stoi(tag);
      double v;
      in >> v;
      p.c[idx] = v;
    }
  }
  if (rows < 0) throw std::runtime_error("missing rows line");
  p.A.resize(rows, p.num_vars());
  p.A.setFromTriplets(triplets.begin(), triplets.end());
  p.check();
  return p;
}

}  // namespace sbsos
