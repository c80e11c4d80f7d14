#pragma once

// Alternating forms on R^n with dense coefficients over the lexicographic
// basis, and the constant metrics that act on them.

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "holonomy/basis.hpp"
#include "holonomy/linalg.hpp"

namespace holonomy {

template <class Scalar>
class KForm {
 public:
  using Vector = VectorX<Scalar>;

  KForm() : KForm(0, 0) {}
  KForm(int n, int k) : n_(n), k_(k), coeffs_(Vector::Zero(form_basis(n, k).size())) {}
  KForm(int n, int k, Vector coeffs) : n_(n), k_(k), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != form_basis(n, k).size())
      throw DimensionMismatch("expected " + std::to_string(binomial(n, k)) + " coefficients");
  }

  static KForm constant(int n, const Scalar& c) {
    KForm out(n, 0);
    out.coeffs_(0) = c;
    return out;
  }

  static KForm volume(int n) {
    KForm out(n, n);
    out.coeffs_(0) = Scalar(1);
    return out;
  }

  /// c·e^{i1}∧...∧e^{ik} for 1-based indices in any order.
  static KForm basis(int n, std::vector<int> indices, const Scalar& c = Scalar(1)) {
    KForm out(n, static_cast<int>(indices.size()));
    IndexMask mask = 0;
    const int sign = mask_from_indices(indices, n, mask);
    if (sign != 0) out.coeffs_(out.position(mask)) = Scalar(sign) * c;
    return out;
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  const FormBasis& basis_table() const { return form_basis(n_, k_); }
  int position(IndexMask mask) const { return basis_table().position(mask); }

  Scalar coeff(IndexMask mask) const { return coeffs_(position(mask)); }
  Scalar coeff(std::vector<int> one_based) const {
    IndexMask mask = 0;
    const int sign = mask_from_indices(one_based, n_, mask);
    if (sign == 0) return Scalar(0);
    return Scalar(sign) * coeff(mask);
  }
  void add_to(IndexMask mask, const Scalar& value) { coeffs_(position(mask)) += value; }

  bool is_zero(double tol = 0.0) const {
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i)
      if (!holonomy::is_zero(coeffs_(i), tol)) return false;
    return true;
  }

  template <class Other>
  KForm<Other> cast() const {
    VectorX<Other> c(coeffs_.size());
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
      if constexpr (std::is_same_v<Other, double>) c(i) = to_double(coeffs_(i));
      else c(i) = Other(coeffs_(i));
    }
    return KForm<Other>(n_, k_, std::move(c));
  }

  KForm& operator+=(const KForm& o) {
    require_same_space(o);
    coeffs_ += o.coeffs_;
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    require_same_space(o);
    coeffs_ -= o.coeffs_;
    return *this;
  }
  KForm& operator*=(const Scalar& s) {
    coeffs_ *= s;
    return *this;
  }
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator-(KForm a) {
    a.coeffs_ = -a.coeffs_;
    return a;
  }
  friend KForm operator*(const Scalar& s, KForm a) { return a *= s; }
  friend KForm operator*(KForm a, const Scalar& s) { return a *= s; }
  friend bool operator==(const KForm& a, const KForm& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void require_same_space(const KForm& o) const {
    if (o.n_ != n_ || o.k_ != k_) throw DimensionMismatch("forms live in different spaces");
  }

  int n_;
  int k_;
  Vector coeffs_;
};

using KFormQ = KForm<Rational>;
using KFormD = KForm<double>;

/// Maximum coefficient magnitude, as a double.
template <class Scalar>
double max_abs_coeff(const KForm<Scalar>& a) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.coeffs().size(); ++i) m = std::max(m, std::abs(to_double(a.coeffs()(i))));
  return m;
}

/// Coefficient-wise Euclidean norm (standard basis orthonormal), as a double.
template <class Scalar>
double coeff_norm(const KForm<Scalar>& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.coeffs().size(); ++i) {
    const double c = to_double(a.coeffs()(i));
    s += c * c;
  }
  return std::sqrt(s);
}

template <class Scalar>
KForm<Scalar> wedge(const KForm<Scalar>& a, const KForm<Scalar>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("wedge of forms on different spaces");
  const int n = a.dim();
  if (a.degree() + b.degree() > n)
    throw DegreeOverflow("wedge degree " + std::to_string(a.degree() + b.degree()) + " exceeds n=" + std::to_string(n));
  KForm<Scalar> out(n, a.degree() + b.degree());
  const auto& ba = a.basis_table();
  const auto& bb = b.basis_table();
  const auto& bo = out.basis_table();
  for (int i = 0; i < ba.size(); ++i) {
    if (a.coeffs()(i) == Scalar(0)) continue;
    for (int j = 0; j < bb.size(); ++j) {
      if (b.coeffs()(j) == Scalar(0)) continue;
      const int s = wedge_sign(ba.masks[i], bb.masks[j]);
      if (s == 0) continue;
      const Scalar term = a.coeffs()(i) * b.coeffs()(j);
      out.coeffs()(bo.position(ba.masks[i] | bb.masks[j])) += s > 0 ? term : Scalar(-term);
    }
  }
  return out;
}

/// Interior product ι_v a.
template <class Scalar>
KForm<Scalar> contract(const VectorX<Scalar>& v, const KForm<Scalar>& a) {
  if (v.size() != a.dim()) throw DimensionMismatch("vector and form dimensions differ");
  if (a.degree() == 0) throw DegreeOverflow("interior product of a 0-form");
  KForm<Scalar> out(a.dim(), a.degree() - 1);
  const auto& ba = a.basis_table();
  const auto& bo = out.basis_table();
  for (int i = 0; i < ba.size(); ++i) {
    if (a.coeffs()(i) == Scalar(0)) continue;
    int slot = 0;
    for (int idx : mask_indices(ba.masks[i])) {
      if (v(idx) != Scalar(0)) {
        const Scalar term = v(idx) * a.coeffs()(i);
        out.coeffs()(bo.position(ba.masks[i] & ~(IndexMask{1} << idx))) += (slot % 2) ? Scalar(-term) : term;
      }
      ++slot;
    }
  }
  return out;
}

template <class Scalar>
VectorX<Scalar> unit_vector(int n, int index) {
  VectorX<Scalar> v = VectorX<Scalar>::Zero(n);
  v(index) = Scalar(1);
  return v;
}

/// a(v_1, ..., v_k) for the columns of `vectors`.
template <class Scalar>
Scalar evaluate(const KForm<Scalar>& a, const MatrixX<Scalar>& vectors) {
  if (vectors.rows() != a.dim() || vectors.cols() != a.degree())
    throw DimensionMismatch("evaluation needs k vectors in R^n");
  const auto& b = a.basis_table();
  Scalar total(0);
  const IndexMask all_cols = full_mask(a.degree());
  for (int i = 0; i < b.size(); ++i) {
    if (a.coeffs()(i) == Scalar(0)) continue;
    total += a.coeffs()(i) * minor_determinant(vectors, b.masks[i], all_cols);
  }
  return total;
}

/// The coefficient of e^{1...n} in a top-degree form.
template <class Scalar>
Scalar top_coefficient(const KForm<Scalar>& a) {
  if (a.degree() != a.dim()) throw DegreeOverflow("not a top-degree form");
  return a.coeffs()(0);
}

/// Pullback A^*a, where A acts on vectors: (A^*a)(v,...) = a(Av,...).
template <class Scalar>
KForm<Scalar> pullback(const MatrixX<Scalar>& A, const KForm<Scalar>& a) {
  if (A.rows() != a.dim() || A.cols() != a.dim()) throw DimensionMismatch("pullback needs an n×n matrix");
  KForm<Scalar> out(a.dim(), a.degree());
  const auto& b = a.basis_table();
  for (int j = 0; j < b.size(); ++j) {
    if (a.coeffs()(j) == Scalar(0)) continue;
    for (int i = 0; i < b.size(); ++i) {
      const Scalar m = minor_determinant(A, b.masks[j], b.masks[i]);
      if (m != Scalar(0)) out.coeffs()(i) += a.coeffs()(j) * m;
    }
  }
  return out;
}

/// Constant symmetric bilinear form with a chosen orientation (+1 means
/// e^1∧...∧e^n is positive).
template <class Scalar>
class Metric {
 public:
  using Matrix = MatrixX<Scalar>;

  explicit Metric(Matrix entries, int orientation = 1, double symmetry_tol = 1e-12)
      : entries_(std::move(entries)), orientation_(orientation >= 0 ? 1 : -1) {
    if (entries_.rows() != entries_.cols()) throw DimensionMismatch("metric must be square");
    if (!is_symmetric(entries_, symmetry_tol)) throw ValidationError("metric is not symmetric");
  }

  static Metric identity(int n) { return Metric(Matrix::Identity(n, n)); }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  int orientation() const { return orientation_; }

  Matrix inverse() const { return holonomy::inverse(entries_); }
  Scalar determinant() const { return holonomy::determinant(entries_); }
  bool is_positive_definite() const { return holonomy::is_positive_definite(entries_); }

  void require_positive_definite() const {
    if (!is_positive_definite()) throw NotPositiveDefinite("metric is not positive definite");
  }

  /// Signed volume density: orientation · sqrt(det g).
  Scalar volume_scalar() const { return Scalar(orientation_) * sqrt_of(determinant()); }

  /// Gram matrix of the induced inner product on Λ^k: ⟨e^I, e^J⟩ = det(g⁻¹[I,J]).
  Matrix form_gram(int k) const { return form_gram_from_inverse(inverse(), k); }

  static Matrix form_gram_from_inverse(const Matrix& inv, int k) {
    const auto& b = form_basis(static_cast<int>(inv.rows()), k);
    Matrix gram(b.size(), b.size());
    for (int i = 0; i < b.size(); ++i)
      for (int j = i; j < b.size(); ++j) gram(i, j) = gram(j, i) = minor_determinant(inv, b.masks[i], b.masks[j]);
    return gram;
  }

  template <class Other>
  Metric<Other> cast() const {
    MatrixX<Other> m(entries_.rows(), entries_.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if constexpr (std::is_same_v<Other, double>) m(i, j) = to_double(entries_(i, j));
        else m(i, j) = Other(entries_(i, j));
      }
    return Metric<Other>(std::move(m), orientation_);
  }

  friend bool operator==(const Metric& a, const Metric& b) {
    return a.orientation_ == b.orientation_ && a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
  int orientation_;
};

/// g ↦ Aᵀ g A, orientation multiplied by sign(det A).
template <class Scalar>
Metric<Scalar> pullback(const MatrixX<Scalar>& A, const Metric<Scalar>& g) {
  if (A.rows() != g.dim() || A.cols() != g.dim()) throw DimensionMismatch("pullback needs an n×n matrix");
  MatrixX<Scalar> m = A.transpose() * g.entries() * A;
  return Metric<Scalar>(std::move(m), g.orientation() * sign_of(determinant(A)));
}

template <class Scalar>
Scalar inner(const KForm<Scalar>& a, const KForm<Scalar>& b, const Metric<Scalar>& g) {
  if (a.dim() != g.dim() || b.dim() != g.dim() || a.degree() != b.degree())
    throw DimensionMismatch("inner product of incompatible forms");
  return a.coeffs().dot(g.form_gram(a.degree()) * b.coeffs());
}

template <class Scalar>
Scalar norm_squared(const KForm<Scalar>& a, const Metric<Scalar>& g) {
  return inner(a, a, g);
}

/// The Riemannian volume form of g with its orientation.
template <class Scalar>
KForm<Scalar> volume_form(const Metric<Scalar>& g) {
  return g.volume_scalar() * KForm<Scalar>::volume(g.dim());
}

/// Hodge star defined by a ∧ *b = ⟨a, b⟩_g vol_g, computed with Gram
/// determinants of index subsets (no eigendecomposition).
template <class Scalar>
KForm<Scalar> hodge_star(const KForm<Scalar>& a, const Metric<Scalar>& g) {
  if (a.dim() != g.dim()) throw DimensionMismatch("form and metric dimensions differ");
  g.require_positive_definite();
  const int n = a.dim();
  const int k = a.degree();
  const Scalar vol = g.volume_scalar();
  const auto gram = g.form_gram(k);
  const VectorX<Scalar> pairing = gram * a.coeffs();  // ⟨e^I, a⟩
  KForm<Scalar> out(n, n - k);
  const auto& b = a.basis_table();
  const IndexMask all = full_mask(n);
  for (int i = 0; i < b.size(); ++i) {
    if (pairing(i) == Scalar(0)) continue;
    const IndexMask complement = all & ~b.masks[i];
    // e^I ∧ (c e^{I^c}) = c·sign(I, I^c) e^{1..n}
    out.add_to(complement, Scalar(wedge_sign(b.masks[i], complement)) * vol * pairing(i));
  }
  return out;
}

}  // namespace holonomy
