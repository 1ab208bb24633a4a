#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace sbsos {

/// Standard-form conic program over the product cone
///   K = S+^{d_1} x ... x S+^{d_p} x R+^{num_nonneg} x R^{num_free}
/// in the scalarized variable vector
///   v = [svec(Q_1); ...; svec(Q_p); nonneg; free],
/// subject to A v = b, maximizing c' v. PSD blocks use the scaled symmetric
/// vectorization (off-diagonals times sqrt(2)) so Euclidean inner products
/// agree with matrix inner products.
struct SdpProblem {
  std::vector<int> psd_dims;
  int num_nonneg = 0;
  int num_free = 0;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  int num_rows() const { return static_cast<int>(b.size()); }
  int num_vars() const;
  int psd_var_count() const;
  int psd_offset(int block) const;
  int nonneg_offset() const { return psd_var_count(); }
  int free_offset() const { return psd_var_count() + num_nonneg; }

  /// Structural sanity (dimension agreement); throws on violation.
  void check() const;

  /// Sparse text round-trip for debugging and external solvers.
  std::string to_text() const;
  static SdpProblem from_text(const std::string& text);
};

int svec_size(int n);
/// Index of entry (a, b), a <= b, in column-stacked upper-triangle order.
int svec_index(int a, int b);

Eigen::MatrixXd svec_to_matrix(const Eigen::Ref<const Eigen::VectorXd>& v, int n);
Eigen::VectorXd matrix_to_svec(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace sbsos
