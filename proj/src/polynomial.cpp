#include "sbsos/polynomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sbsos {

Monomial Monomial::var(VarId v, int exponent) {
  Monomial m;
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  if (exponent > 0) m.factors_.emplace_back(v, exponent);
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [v, e] : factors_) d += e;
  return d;
}

int Monomial::exponent(VarId v) const {
  for (const auto& [var, e] : factors_) {
    if (var == v) return e;
    if (var > v) break;
  }
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  return out;
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  return factors_ <=> other.factors_;
}

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, e] : factors_) {
    if (!first) os << "*";
    first = false;
    os << "x" << v;
    if (e > 1) os << "^" << e;
  }
  return os.str();
}

Polynomial::Polynomial(double constant) {
  if (std::abs(constant) >= kPruneTol) terms_[Monomial{}] = constant;
}

Polynomial Polynomial::variable(VarId v) {
  Polynomial p;
  p.terms_[Monomial::var(v)] = 1.0;
  return p;
}

Polynomial Polynomial::term(double coeff, const Monomial& m) {
  Polynomial p;
  p.add_term(coeff, m);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const { return coeff(Monomial{}); }

std::vector<VarId> Polynomial::support() const {
  std::vector<VarId> vars;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.factors()) vars.push_back(v);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

void Polynomial::add_term(double coeff, const Monomial& m) {
  terms_[m] += coeff;
  prune(m);
}

void Polynomial::prune(const Monomial& m) {
  auto it = terms_.find(m);
  if (it != terms_.end() && std::abs(it->second) < kPruneTol) terms_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(c, m);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(-c, m);
  return *this;
}

Polynomial& Polynomial::operator*=(double k) {
  if (k == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= k;
  for (auto it = terms_.begin(); it != terms_.end();) {
    it = std::abs(it->second) < kPruneTol ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  out += other;
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial out = *this;
  out -= other;
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      out.add_term(ca * cb, ma * mb);
    }
  }
  return out;
}

Polynomial Polynomial::operator*(double k) const {
  Polynomial out = *this;
  out *= k;
  return out;
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

double Polynomial::eval(const std::vector<double>& values) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double prod = c;
    for (const auto& [v, e] : m.factors()) {
      if (v < 0 || static_cast<size_t>(v) >= values.size()) {
        throw std::out_of_range("eval: assignment missing variable x" + std::to_string(v));
      }
      for (int k = 0; k < e; ++k) prod *= values[v];
    }
    sum += prod;
  }
  return sum;
}

Polynomial Polynomial::substitute(VarId v, double value) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(v);
    if (e == 0) {
      out.add_term(c, m);
      continue;
    }
    double scaled = c;
    for (int k = 0; k < e; ++k) scaled *= value;
    Monomial reduced;
    for (const auto& [var, exp] : m.factors()) {
      if (var != v) reduced = reduced * Monomial::var(var, exp);
    }
    out.add_term(scaled, reduced);
  }
  return out;
}

Polynomial Polynomial::derivative(VarId v) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(v);
    if (e == 0) continue;
    Monomial reduced;
    for (const auto& [var, exp] : m.factors()) {
      int new_exp = (var == v) ? exp - 1 : exp;
      if (new_exp > 0) reduced = reduced * Monomial::var(var, new_exp);
    }
    out.add_term(c * e, reduced);
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c >= 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    if (!m.is_constant()) os << "*" << m.to_string();
  }
  return os.str();
}

PolyMatrix hessian(const Polynomial& p) {
  PolyMatrix h;
  h.vars = p.support();
  const size_t n = h.vars.size();
  h.entries.resize(n * n);
  for (size_t r = 0; r < n; ++r) {
    Polynomial dr = p.derivative(h.vars[r]);
    for (size_t c = r; c < n; ++c) {
      Polynomial drc = dr.derivative(h.vars[c]);
      h.entries[r * n + c] = drc;
      h.entries[c * n + r] = drc;
    }
  }
  return h;
}

SosConvexity is_sos_convex(const Polynomial& p) {
  if (p.degree() > 2) {
    throw std::invalid_argument(
        "is_sos_convex: unsupported degree (Hessian not constant)");
  }
  SosConvexity out;
  PolyMatrix h = hessian(p);
  out.vars = h.vars;
  const int n = static_cast<int>(h.vars.size());
  Eigen::MatrixXd H(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) H(r, c) = h.at(r, c).constant_term();
  }
  if (n == 0) {
    out.ok = true;
    out.gram_factor.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  out.min_eigenvalue = ev.minCoeff();
  out.ok = out.min_eigenvalue >= -1e-9 * scale;
  Eigen::VectorXd clipped = ev.cwiseMax(0.0).cwiseSqrt();
  out.gram_factor = eig.eigenvectors() * clipped.asDiagonal();
  out.recon_error =
      (out.gram_factor * out.gram_factor.transpose() - H).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace sbsos
