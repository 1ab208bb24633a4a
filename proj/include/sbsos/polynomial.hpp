#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sbsos {

/// Index into the global variable vector (pose-major, then landmark-major).
using VarId = int32_t;

/// Sparse power product over VarIds. Factors are kept sorted by variable id
/// with strictly positive exponents, so equal monomials compare equal.
class Monomial {
 public:
  Monomial() = default;

  static Monomial var(VarId v, int exponent = 1);

  int degree() const;
  int exponent(VarId v) const;
  bool is_constant() const { return factors_.empty(); }

  const std::vector<std::pair<VarId, int>>& factors() const { return factors_; }

  Monomial operator*(const Monomial& other) const;

  bool operator==(const Monomial& other) const = default;
  // Graded order: total degree first, then the sorted factor list. Any total
  // order works downstream; this one keeps low-degree monomials first.
  std::strong_ordering operator<=>(const Monomial& other) const;

  std::string to_string() const;

 private:
  std::vector<std::pair<VarId, int>> factors_;
};

/// Sparse multivariate polynomial with real coefficients. Coefficients with
/// magnitude below kPruneTol are dropped on mutation.
class Polynomial {
 public:
  static constexpr double kPruneTol = 1e-14;

  using TermMap = std::map<Monomial, double>;

  Polynomial() = default;
  explicit Polynomial(double constant);

  static Polynomial variable(VarId v);
  static Polynomial term(double coeff, const Monomial& m);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double coeff(const Monomial& m) const;
  double constant_term() const;

  /// Distinct variables appearing with nonzero coefficient, ascending.
  std::vector<VarId> support() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double k);
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double k) const;
  Polynomial operator-() const;

  /// Direct term-by-term evaluation. `values` is indexed by VarId and must
  /// cover every variable in the support.
  double eval(const std::vector<double>& values) const;

  /// Replace one variable by a constant.
  Polynomial substitute(VarId v, double value) const;

  Polynomial derivative(VarId v) const;

  void add_term(double coeff, const Monomial& m);

  std::string to_string() const;

 private:
  void prune(const Monomial& m);

  TermMap terms_;
};

/// Symmetric matrix of polynomials over an explicit variable ordering
/// (row/column i corresponds to vars[i]).
struct PolyMatrix {
  std::vector<VarId> vars;
  std::vector<Polynomial> entries;  // row-major, vars.size() x vars.size()

  const Polynomial& at(int r, int c) const {
    return entries[static_cast<size_t>(r) * vars.size() + c];
  }
};

/// Second-derivative matrix of `p` over its support variables.
PolyMatrix hessian(const Polynomial& p);

/// Result of the constant-Hessian SOS-convexity test.
struct SosConvexity {
  bool ok = false;
  std::vector<VarId> vars;
  Eigen::MatrixXd gram_factor;  // L with hessian == L * L^T when ok
  double recon_error = 0.0;     // max-entry error of L L^T vs the Hessian
  double min_eigenvalue = 0.0;
};

/// Decides SOS-convexity for polynomials of degree <= 2 by checking the
/// constant Hessian for positive semidefiniteness and returning a factor.
/// Throws std::invalid_argument for degree > 2 (non-constant Hessian).
SosConvexity is_sos_convex(const Polynomial& p);

}  // namespace sbsos
