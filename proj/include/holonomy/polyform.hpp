#pragma once

// Differential forms on flat R^n with polynomial coefficients. d and d* are
// exact: d = Σ e^i ∧ ∂_i and d* = -Σ ι_{e_i} ∂_i for the identity metric.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "holonomy/kform.hpp"

namespace holonomy {

using Monomial = std::array<std::uint8_t, kMaxDim>;

inline int monomial_degree(const Monomial& m) {
  int d = 0;
  for (auto e : m) d += e;
  return d;
}

template <class Scalar>
class Polynomial {
 public:
  using Terms = std::map<Monomial, Scalar>;

  explicit Polynomial(int variables = 0) : vars_(variables) {
    if (variables < 0 || variables > kMaxDim) throw DimensionMismatch("polynomial variable count out of range");
  }

  static Polynomial constant(int variables, const Scalar& c) {
    Polynomial p(variables);
    p.add_term(Monomial{}, c);
    return p;
  }

  /// x_{index+1} (0-based index).
  static Polynomial variable(int variables, int index, const Scalar& c = Scalar(1)) {
    Polynomial p(variables);
    if (index < 0 || index >= variables) throw DimensionMismatch("variable index out of range");
    Monomial m{};
    m[index] = 1;
    p.add_term(m, c);
    return p;
  }

  int variables() const { return vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{}); }

  /// -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
    return d;
  }

  Scalar coefficient(const Monomial& m) const {
    const auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  Scalar constant_term() const { return coefficient(Monomial{}); }

  void add_term(const Monomial& m, const Scalar& c) {
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  Polynomial derivative(int index) const {
    Polynomial out(vars_);
    for (const auto& [m, c] : terms_) {
      if (m[index] == 0) continue;
      Monomial reduced = m;
      --reduced[index];
      out.add_term(reduced, c * Scalar(static_cast<int>(m[index])));
    }
    return out;
  }

  template <class Point>
  Scalar evaluate(const Point& x) const {
    Scalar total(0);
    for (const auto& [m, c] : terms_) {
      Scalar term = c;
      for (int i = 0; i < vars_; ++i)
        for (int e = 0; e < m[i]; ++e) term *= x[i];
      total += term;
    }
    return total;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Scalar(-1); }
  friend Polynomial operator*(const Scalar& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same(b);
    Polynomial out(a.vars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m{};
        for (int i = 0; i < kMaxDim; ++i) {
          const int e = ma[i] + mb[i];
          if (e > 255) throw DegreeCapExceeded("monomial exponent overflow");
          m[i] = static_cast<std::uint8_t>(e);
        }
        out.add_term(m, ca * cb);
      }
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  void require_same(const Polynomial& o) const {
    if (o.vars_ != vars_) throw DimensionMismatch("polynomials in different variable counts");
  }

  int vars_;
  Terms terms_;
};

/// "3/2*x1^2*x3 - x2"; "0" for the zero polynomial.
template <class Scalar>
std::string format_polynomial(const Polynomial<Scalar>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = sign_of(c) < 0;
    const Scalar magnitude = negative ? Scalar(-c) : c;
    if (out.empty()) out += negative ? "-" : "";
    else out += negative ? " - " : " + ";
    std::string body;
    for (int i = 0; i < kMaxDim; ++i) {
      if (m[i] == 0) continue;
      if (!body.empty()) body += '*';
      body += "x" + std::to_string(i + 1);
      if (m[i] > 1) body += "^" + std::to_string(m[i]);
    }
    if (body.empty()) out += format_scalar(magnitude);
    else if (magnitude == Scalar(1)) out += body;
    else out += format_scalar(magnitude) + "*" + body;
  }
  return out;
}

template <class Scalar>
class PolyForm {
 public:
  static constexpr int kDefaultDegreeCap = 16;

  PolyForm(int n, int k, int degree_cap = kDefaultDegreeCap)
      : n_(n), k_(k), cap_(degree_cap), coeffs_(form_basis(n, k).size(), Polynomial<Scalar>(n)) {}

  static PolyForm function(const Polynomial<Scalar>& u, int degree_cap = kDefaultDegreeCap) {
    PolyForm out(u.variables(), 0, degree_cap);
    out.coeffs_[0] = u;
    out.check_cap();
    return out;
  }

  static PolyForm from_constant(const KForm<Scalar>& a, int degree_cap = kDefaultDegreeCap) {
    PolyForm out(a.dim(), a.degree(), degree_cap);
    for (Eigen::Index i = 0; i < a.coeffs().size(); ++i)
      out.coeffs_[i] = Polynomial<Scalar>::constant(a.dim(), a.coeffs()(i));
    return out;
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  int degree_cap() const { return cap_; }
  const FormBasis& basis_table() const { return form_basis(n_, k_); }
  const std::vector<Polynomial<Scalar>>& coeffs() const { return coeffs_; }
  Polynomial<Scalar>& coeff(int position) { return coeffs_.at(position); }
  const Polynomial<Scalar>& coeff(int position) const { return coeffs_.at(position); }
  Polynomial<Scalar>& coeff(IndexMask mask) { return coeffs_[basis_table().position(mask)]; }

  int polynomial_degree() const {
    int d = -1;
    for (const auto& c : coeffs_) d = std::max(d, c.degree());
    return d;
  }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  bool is_constant() const {
    for (const auto& c : coeffs_)
      if (!c.is_constant()) return false;
    return true;
  }

  KForm<Scalar> to_constant() const {
    if (!is_constant()) throw ValidationError("form has non-constant coefficients");
    KForm<Scalar> out(n_, k_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs()(i) = coeffs_[i].constant_term();
    return out;
  }

  /// Value at a point as a constant form.
  template <class Point>
  KForm<Scalar> at(const Point& x) const {
    KForm<Scalar> out(n_, k_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs()(i) = coeffs_[i].evaluate(x);
    return out;
  }

  void check_cap() const {
    if (polynomial_degree() > cap_)
      throw DegreeCapExceeded("polynomial degree " + std::to_string(polynomial_degree()) + " exceeds cap " +
                              std::to_string(cap_));
  }

  PolyForm& operator+=(const PolyForm& o) {
    require_same_space(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  PolyForm& operator-=(const PolyForm& o) {
    require_same_space(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  PolyForm& operator*=(const Scalar& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator-(PolyForm a) { return a *= Scalar(-1); }
  friend PolyForm operator*(const Scalar& s, PolyForm a) { return a *= s; }
  friend PolyForm operator*(const Polynomial<Scalar>& p, PolyForm a) {
    for (auto& c : a.coeffs_) c = p * c;
    a.check_cap();
    return a;
  }
  friend bool operator==(const PolyForm& a, const PolyForm& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void require_same_space(const PolyForm& o) const {
    if (o.n_ != n_ || o.k_ != k_) throw DimensionMismatch("polynomial forms live in different spaces");
  }

  int n_;
  int k_;
  int cap_;
  std::vector<Polynomial<Scalar>> coeffs_;
};

using PolynomialQ = Polynomial<Rational>;
using PolyFormQ = PolyForm<Rational>;

template <class Scalar>
PolyForm<Scalar> wedge(const PolyForm<Scalar>& a, const PolyForm<Scalar>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("wedge of forms on different spaces");
  const int n = a.dim();
  if (a.degree() + b.degree() > n) throw DegreeOverflow("wedge degree exceeds dimension");
  PolyForm<Scalar> out(n, a.degree() + b.degree(), std::min(a.degree_cap(), b.degree_cap()));
  const auto& ba = a.basis_table();
  const auto& bb = b.basis_table();
  const auto& bo = out.basis_table();
  for (int i = 0; i < ba.size(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = 0; j < bb.size(); ++j) {
      if (b.coeff(j).is_zero()) continue;
      const int s = wedge_sign(ba.masks[i], bb.masks[j]);
      if (s == 0) continue;
      out.coeff(bo.position(ba.masks[i] | bb.masks[j])) += Scalar(s) * (a.coeff(i) * b.coeff(j));
    }
  }
  out.check_cap();
  return out;
}

template <class Scalar>
PolyForm<Scalar> wedge(const PolyForm<Scalar>& a, const KForm<Scalar>& b) {
  return wedge(a, PolyForm<Scalar>::from_constant(b, a.degree_cap()));
}

/// Interior product with a constant vector field.
template <class Scalar>
PolyForm<Scalar> contract(const VectorX<Scalar>& v, const PolyForm<Scalar>& a) {
  if (v.size() != a.dim()) throw DimensionMismatch("vector and form dimensions differ");
  if (a.degree() == 0) throw DegreeOverflow("interior product of a 0-form");
  PolyForm<Scalar> out(a.dim(), a.degree() - 1, a.degree_cap());
  const auto& ba = a.basis_table();
  const auto& bo = out.basis_table();
  for (int i = 0; i < ba.size(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    int slot = 0;
    for (int idx : mask_indices(ba.masks[i])) {
      if (v(idx) != Scalar(0)) {
        const Scalar factor = (slot % 2) ? Scalar(-v(idx)) : v(idx);
        out.coeff(bo.position(ba.masks[i] & ~(IndexMask{1} << idx))) += factor * a.coeff(i);
      }
      ++slot;
    }
  }
  return out;
}

/// Coefficient-wise partial derivative ∂_i.
template <class Scalar>
PolyForm<Scalar> partial(const PolyForm<Scalar>& a, int index) {
  PolyForm<Scalar> out(a.dim(), a.degree(), a.degree_cap());
  for (int i = 0; i < a.basis_table().size(); ++i) out.coeff(i) = a.coeff(i).derivative(index);
  return out;
}

template <class Scalar>
PolyForm<Scalar> poly_d(const PolyForm<Scalar>& a) {
  a.check_cap();
  const int n = a.dim();
  if (a.degree() == n) return PolyForm<Scalar>(n, n, a.degree_cap());
  PolyForm<Scalar> out(n, a.degree() + 1, a.degree_cap());
  const auto& ba = a.basis_table();
  const auto& bo = out.basis_table();
  for (int i = 0; i < ba.size(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int var = 0; var < n; ++var) {
      const IndexMask bit = IndexMask{1} << var;
      const int s = wedge_sign(bit, ba.masks[i]);
      if (s == 0) continue;
      auto dp = a.coeff(i).derivative(var);
      if (dp.is_zero()) continue;
      out.coeff(bo.position(bit | ba.masks[i])) += Scalar(s) * dp;
    }
  }
  return out;
}

template <class Scalar>
PolyForm<Scalar> poly_dstar(const PolyForm<Scalar>& a) {
  a.check_cap();
  const int n = a.dim();
  if (a.degree() == 0) return PolyForm<Scalar>(n, 0, a.degree_cap());
  PolyForm<Scalar> out(n, a.degree() - 1, a.degree_cap());
  for (int var = 0; var < n; ++var) out -= contract(unit_vector<Scalar>(n, var), partial(a, var));
  return out;
}

/// Hodge star for the identity metric and standard orientation, applied
/// coefficient-wise.
template <class Scalar>
PolyForm<Scalar> hodge_star(const PolyForm<Scalar>& a) {
  const int n = a.dim();
  PolyForm<Scalar> out(n, n - a.degree(), a.degree_cap());
  const auto& b = a.basis_table();
  for (int i = 0; i < b.size(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    const IndexMask complement = full_mask(n) & ~b.masks[i];
    out.coeff(complement) += Scalar(wedge_sign(b.masks[i], complement)) * a.coeff(i);
  }
  return out;
}

/// Gradient 1-form du of a polynomial function.
template <class Scalar>
PolyForm<Scalar> exterior_derivative(const Polynomial<Scalar>& u, int degree_cap = PolyForm<Scalar>::kDefaultDegreeCap) {
  return poly_d(PolyForm<Scalar>::function(u, degree_cap));
}

/// ½|x|² in n variables.
template <class Scalar>
Polynomial<Scalar> half_radius_squared(int n) {
  Polynomial<Scalar> p(n);
  for (int i = 0; i < n; ++i) {
    Monomial m{};
    m[i] = 2;
    p.add_term(m, Scalar(1) / Scalar(2));
  }
  return p;
}

/// "e1,2: x1 + 1; e2,3: ..." listing of the non-zero coefficients.
template <class Scalar>
std::string format_polyform(const PolyForm<Scalar>& a) {
  if (a.is_zero()) return "0";
  std::string out;
  const auto& b = a.basis_table();
  for (int i = 0; i < b.size(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    if (!out.empty()) out += "; ";
    out += "e" + (a.degree() == 0 ? std::string("()") : format_indices(b.masks[i])) + ": " +
           format_polynomial(a.coeff(i));
  }
  return out;
}

/// Coefficients keyed by "basis tuple|monomial", for residual comparisons.
template <class Scalar>
std::map<std::string, double> labeled_coefficients(const PolyForm<Scalar>& a) {
  std::map<std::string, double> out;
  const auto& b = a.basis_table();
  for (int i = 0; i < b.size(); ++i)
    for (const auto& [m, c] : a.coeff(i).terms()) {
      Polynomial<Scalar> unit(a.dim());
      unit.add_term(m, Scalar(1));
      out[format_indices(b.masks[i]) + "|" + format_polynomial(unit)] = to_double(c);
    }
  return out;
}

}  // namespace holonomy
