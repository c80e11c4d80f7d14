#pragma once

// Symmetric 2-tensors acting on forms: h_*κ = −Σ_j h(e_j,·) ∧ ι_{e_j}κ for an
// orthonormal frame (e_j), trace and SU(3)-type splittings, injectivity ranks,
// and exact checks of two flat-space identities.

#include <string>
#include <vector>

#include "holonomy/polyform.hpp"
#include "holonomy/stable_forms.hpp"

namespace holonomy {

template <class Scalar>
class Sym2Tensor {
 public:
  using Matrix = MatrixX<Scalar>;

  explicit Sym2Tensor(Matrix entries, double tol = 0.0) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw DimensionMismatch("symmetric tensor must be square");
    if (!is_symmetric(entries_, tol)) throw ValidationError("tensor is not symmetric");
  }

  static Sym2Tensor zero(int n) { return Sym2Tensor(Matrix::Zero(n, n)); }
  static Sym2Tensor from_metric(const Metric<Scalar>& g) { return Sym2Tensor(g.entries()); }

  /// e^a ⊗ e^b + e^b ⊗ e^a (or e^a ⊗ e^a), 0-based indices.
  static Sym2Tensor elementary(int n, int a, int b) {
    Matrix m = Matrix::Zero(n, n);
    m(a, b) = Scalar(1);
    m(b, a) = Scalar(1);
    return Sym2Tensor(m);
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }

  Sym2Tensor& operator+=(const Sym2Tensor& o) {
    entries_ += o.entries_;
    return *this;
  }
  Sym2Tensor& operator-=(const Sym2Tensor& o) {
    entries_ -= o.entries_;
    return *this;
  }
  friend Sym2Tensor operator+(Sym2Tensor a, const Sym2Tensor& b) { return a += b; }
  friend Sym2Tensor operator-(Sym2Tensor a, const Sym2Tensor& b) { return a -= b; }
  friend Sym2Tensor operator*(const Scalar& s, Sym2Tensor a) {
    a.entries_ *= s;
    return a;
  }
  friend bool operator==(const Sym2Tensor& a, const Sym2Tensor& b) { return a.entries_ == b.entries_; }

 private:
  Matrix entries_;
};

/// Σ_{b,c} C_{bc} e^c ∧ ι_{e_b} κ.
template <class Scalar>
KForm<Scalar> contracted_wedge(const MatrixX<Scalar>& C, const KForm<Scalar>& kappa) {
  const int n = kappa.dim();
  KForm<Scalar> out(n, kappa.degree());
  if (kappa.degree() == 0) return out;
  for (int b = 0; b < n; ++b) {
    if (C.row(b).isZero()) continue;
    const KForm<Scalar> inner = contract(unit_vector<Scalar>(n, b), kappa);
    for (int c = 0; c < n; ++c) {
      if (C(b, c) == Scalar(0)) continue;
      out += C(b, c) * wedge(KForm<Scalar>::basis(n, {c + 1}), inner);
    }
  }
  return out;
}

/// h_*κ. The frame sum Σ_j e_j ⊗ e_j equals g⁻¹, so no frame is needed.
template <class Scalar>
KForm<Scalar> sym2_act(const Sym2Tensor<Scalar>& h, const KForm<Scalar>& kappa, const Metric<Scalar>& g) {
  if (h.dim() != kappa.dim() || g.dim() != kappa.dim()) throw DimensionMismatch("tensor, form and metric differ in n");
  g.require_positive_definite();
  return -contracted_wedge(MatrixX<Scalar>(g.inverse() * h.entries()), kappa);
}

/// h_*κ evaluated literally in a given g-orthonormal frame (columns of F).
template <class Scalar>
KForm<Scalar> sym2_act_in_frame(const Sym2Tensor<Scalar>& h, const KForm<Scalar>& kappa, const MatrixX<Scalar>& F) {
  const int n = kappa.dim();
  if (h.dim() != n || F.rows() != n || F.cols() != n) throw DimensionMismatch("tensor, form and frame differ in n");
  KForm<Scalar> out(n, kappa.degree());
  if (kappa.degree() == 0) return out;
  for (int j = 0; j < n; ++j) {
    const VectorX<Scalar> ej = F.col(j);
    const VectorX<Scalar> covector = h.entries() * ej;  // h(e_j, ·)
    KForm<Scalar> one(n, 1, covector);
    out -= wedge(one, contract(ej, kappa));
  }
  return out;
}

/// Orthonormal frame F = L^{-T} from g = L Lᵀ. Exact only when every pivot
/// has a rational square root.
template <class Scalar>
MatrixX<Scalar> cholesky_frame(const Metric<Scalar>& g) {
  g.require_positive_definite();
  const int n = g.dim();
  MatrixX<Scalar> L = MatrixX<Scalar>::Zero(n, n);
  const auto& a = g.entries();
  for (int j = 0; j < n; ++j) {
    Scalar d = a(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    L(j, j) = sqrt_of(d);
    for (int i = j + 1; i < n; ++i) {
      Scalar s = a(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return inverse(L).transpose();
}

template <class Scalar>
struct TraceSplit {
  Scalar trace;
  Sym2Tensor<Scalar> traceless;
};

template <class Scalar>
Scalar metric_trace(const Sym2Tensor<Scalar>& h, const Metric<Scalar>& g) {
  return (g.inverse() * h.entries()).trace();
}

template <class Scalar>
TraceSplit<Scalar> trace_split(const Sym2Tensor<Scalar>& h, const Metric<Scalar>& g) {
  if (h.dim() != g.dim()) throw DimensionMismatch("tensor and metric differ in n");
  const Scalar tr = metric_trace(h, g);
  MatrixX<Scalar> rest = h.entries() - (tr / Scalar(g.dim())) * g.entries();
  if constexpr (!is_exact_v<Scalar>) rest = (rest + rest.transpose()) / 2.0;
  return {tr, Sym2Tensor<Scalar>(rest)};
}

/// J^*h(u,v) = h(Ju, Jv).
template <class Scalar>
Sym2Tensor<Scalar> j_pullback(const Sym2Tensor<Scalar>& h, const MatrixX<Scalar>& J) {
  MatrixX<Scalar> m = J.transpose() * h.entries() * J;
  if constexpr (!is_exact_v<Scalar>) m = (m + m.transpose()) / 2.0;
  return Sym2Tensor<Scalar>(m);
}

template <class Scalar>
struct SU3Split {
  Sym2Tensor<Scalar> part8;
  Sym2Tensor<Scalar> part12;
};

template <class Scalar>
SU3Split<Scalar> su3_split(const Sym2Tensor<Scalar>& h, const SU3Structure<Scalar>& s, double tol = 1e-12) {
  if (h.dim() != 6) throw DimensionMismatch("SU(3) splitting needs n = 6");
  const Scalar tr = metric_trace(h, s.g);
  const double scale = std::max(1.0, to_double(h.entries().cwiseAbs().maxCoeff()));
  if (!is_zero(tr, is_exact_v<Scalar> ? 0.0 : tol * scale))
    throw ValidationError("su3_split needs a trace-free tensor (trace " + format_scalar(tr) + ")");
  const Sym2Tensor<Scalar> rotated = j_pullback(h, s.J);
  const Scalar half = Scalar(1) / Scalar(2);
  return {half * (h + rotated), half * (h - rotated)};
}

// ------------------------------------------------------------------ ranks

struct RankReport {
  std::string map;
  int domain_dim = 0;
  int rank = 0;
  bool injective() const { return rank == domain_dim; }
};

template <class Scalar>
std::vector<Sym2Tensor<Scalar>> sym2_basis(int n) {
  std::vector<Sym2Tensor<Scalar>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) out.push_back(Sym2Tensor<Scalar>::elementary(n, a, b));
  return out;
}

template <class Scalar>
VectorX<Scalar> flatten(const Sym2Tensor<Scalar>& h) {
  const int n = h.dim();
  VectorX<Scalar> v(n * (n + 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) v(k++) = h.entries()(a, b);
  return v;
}

/// Rank of h ↦ h_*κ restricted to the span of `domain`.
template <class Scalar>
RankReport restricted_rank(const std::string& name, const std::vector<Sym2Tensor<Scalar>>& domain,
                           const KForm<Scalar>& kappa, const Metric<Scalar>& g) {
  const int n = g.dim();
  MatrixX<Scalar> source(domain.size(), n * (n + 1) / 2);
  MatrixX<Scalar> image(domain.size(), kappa.coeffs().size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    source.row(i) = flatten(domain[i]).transpose();
    image.row(i) = sym2_act(domain[i], kappa, g).coeffs().transpose();
  }
  return {name, rank(source), rank(image)};
}

template <class Scalar>
RankReport injectivity_rank(const G2Structure<Scalar>& s) {
  std::vector<Sym2Tensor<Scalar>> traceless;
  for (const auto& h : sym2_basis<Scalar>(7)) traceless.push_back(trace_split(h, s.g).traceless);
  return restricted_rank("Sym2_0 -> Lambda3 via phi", traceless, s.phi, s.g);
}

/// Rank of the unrestricted map Sym² → Λ³ via φ.
template <class Scalar>
RankReport full_sym2_rank(const G2Structure<Scalar>& s) {
  return restricted_rank("Sym2 -> Lambda3 via phi", sym2_basis<Scalar>(7), s.phi, s.g);
}

/// The two SU(3) maps: Sym²₈ → Λ² via ω and Sym²₁₂ → Λ³ via ReΩ.
template <class Scalar>
std::vector<RankReport> injectivity_rank(const SU3Structure<Scalar>& s) {
  std::vector<Sym2Tensor<Scalar>> eight, twelve;
  for (const auto& h : sym2_basis<Scalar>(6)) {
    const auto split = su3_split(trace_split(h, s.g).traceless, s);
    eight.push_back(split.part8);
    twelve.push_back(split.part12);
  }
  return {restricted_rank("Sym2_8 -> Lambda2 via omega", eight, s.omega, s.g),
          restricted_rank("Sym2_12 -> Lambda3 via ReOmega", twelve, s.re_omega, s.g)};
}

// ------------------------------------------------------------------ identities

template <class Scalar>
struct DstarWedgeCheck {
  PolyForm<Scalar> lhs;
  PolyForm<Scalar> rhs;
  PolyForm<Scalar> residual;
};

/// d*(du∧κ) against (d*du)κ − (Hess u)_*κ on flat R^n with κ parallel.
template <class Scalar>
DstarWedgeCheck<Scalar> dstar_wedge_check(const Polynomial<Scalar>& u, const PolyForm<Scalar>& kappa) {
  const int n = kappa.dim();
  if (u.variables() != n) throw DimensionMismatch("function and form live in different dimensions");
  if (!kappa.is_constant()) throw ValidationError("dstar_wedge_check needs a constant-coefficient form");
  const KForm<Scalar> k0 = kappa.to_constant();
  const PolyForm<Scalar> du = exterior_derivative(u, kappa.degree_cap());
  PolyForm<Scalar> lhs = poly_dstar(wedge(du, kappa));

  const Polynomial<Scalar> laplacian = poly_dstar(du).coeff(0);
  PolyForm<Scalar> rhs = laplacian * kappa;
  // (Hess u)_*κ = −Σ H_bc e^c ∧ ι_b κ with polynomial Hessian entries.
  for (int b = 0; b < n; ++b) {
    if (k0.degree() == 0) break;
    const KForm<Scalar> inner = contract(unit_vector<Scalar>(n, b), k0);
    for (int c = 0; c < n; ++c) {
      const Polynomial<Scalar> hess = u.derivative(b).derivative(c);
      if (hess.is_zero()) continue;
      const auto piece = PolyForm<Scalar>::from_constant(wedge(KForm<Scalar>::basis(n, {c + 1}), inner), kappa.degree_cap());
      rhs += hess * piece;  // minus the action, which itself carries a minus sign
    }
  }
  PolyForm<Scalar> residual = lhs - rhs;
  return {std::move(lhs), std::move(rhs), std::move(residual)};
}

template <class Scalar>
DstarWedgeCheck<Scalar> dstar_wedge_check(const Polynomial<Scalar>& u, const KForm<Scalar>& kappa) {
  return dstar_wedge_check(u, PolyForm<Scalar>::from_constant(kappa));
}

/// Value plus first-order part a + εb, ε² = 0.
template <class Scalar>
struct FirstOrder {
  Scalar value;
  Scalar slope;

  friend FirstOrder operator+(const FirstOrder& a, const FirstOrder& b) { return {a.value + b.value, a.slope + b.slope}; }
  friend FirstOrder operator-(const FirstOrder& a, const FirstOrder& b) { return {a.value - b.value, a.slope - b.slope}; }
  friend FirstOrder operator*(const FirstOrder& a, const FirstOrder& b) {
    return {a.value * b.value, a.value * b.slope + a.slope * b.value};
  }
  friend FirstOrder operator/(const FirstOrder& a, const FirstOrder& b) {
    if (b.value == Scalar(0)) throw SingularMatrix("division by an infinitesimal");
    const Scalar inv = Scalar(1) / b.value;
    return {a.value * inv, (a.slope - a.value * b.slope * inv) * inv};
  }
};

/// (g + εh)⁻¹ by Gauss–Jordan over first-order numbers.
template <class Scalar>
std::vector<std::vector<FirstOrder<Scalar>>> first_order_inverse(const MatrixX<Scalar>& g, const MatrixX<Scalar>& h) {
  const int n = static_cast<int>(g.rows());
  using F = FirstOrder<Scalar>;
  std::vector<std::vector<F>> a(n, std::vector<F>(n)), inv(n, std::vector<F>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a[i][j] = {g(i, j), h(i, j)};
      inv[i][j] = {Scalar(i == j ? 1 : 0), Scalar(0)};
    }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && a[pivot][col].value == Scalar(0)) ++pivot;
    if (pivot == n) throw SingularMatrix("metric is singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const F p = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] = a[col][j] / p;
      inv[col][j] = inv[col][j] / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const F factor = a[r][col];
      for (int j = 0; j < n; ++j) {
        a[r][j] = a[r][j] - factor * a[col][j];
        inv[r][j] = inv[r][j] - factor * inv[col][j];
      }
    }
  }
  return inv;
}

/// Laplacian Δ_g u = −g^{ab} ∂_a∂_b u of a polynomial for a constant metric.
template <class Scalar>
Polynomial<Scalar> flat_laplacian(const MatrixX<Scalar>& g_inverse, const Polynomial<Scalar>& u) {
  const int n = u.variables();
  Polynomial<Scalar> out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (g_inverse(a, b) != Scalar(0)) out -= g_inverse(a, b) * u.derivative(a).derivative(b);
  return out;
}

/// Bianchi operator B_g h = δ_g h + ½ d tr_g h for a constant metric and
/// polynomial tensor entries; δ_g h_b = −g^{ac} ∂_a h_{cb}.
template <class Scalar>
std::vector<Polynomial<Scalar>> bianchi_operator(const MatrixX<Scalar>& g_inverse,
                                                 const std::vector<std::vector<Polynomial<Scalar>>>& h) {
  const int n = static_cast<int>(g_inverse.rows());
  Polynomial<Scalar> tr(n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) tr += g_inverse(a, c) * h[a][c];
  std::vector<Polynomial<Scalar>> out(n, Polynomial<Scalar>(n));
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) out[b] -= g_inverse(a, c) * h[c][b].derivative(a);
    out[b] += (Scalar(1) / Scalar(2)) * tr.derivative(b);
  }
  return out;
}

template <class Scalar>
struct VariationCheck {
  Polynomial<Scalar> lhs;  // d/dt|₀ Δ_{g+th} u
  Polynomial<Scalar> rhs;  // c·g(Hess u, h) − g(B_g h, du)
  Polynomial<Scalar> residual;
};

/// First variation of the Laplacian in the direction of a constant h on a flat
/// background. The left side expands (g + εh)⁻¹ to first order; the right side
/// evaluates hess_coefficient·g(Hess u, h) − g(B_g h, du). The variation
/// formula holds with hess_coefficient = 1.
template <class Scalar>
VariationCheck<Scalar> laplacian_variation_check(const Metric<Scalar>& g, const Sym2Tensor<Scalar>& h,
                                                 const Polynomial<Scalar>& u, const Scalar& hess_coefficient = Scalar(1)) {
  const int n = g.dim();
  if (h.dim() != n || u.variables() != n) throw DimensionMismatch("metric, tensor and function differ in n");
  const auto inv = first_order_inverse(g.entries(), h.entries());
  Polynomial<Scalar> lhs(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (inv[a][b].slope != Scalar(0)) lhs -= inv[a][b].slope * u.derivative(a).derivative(b);

  const MatrixX<Scalar> gi = g.inverse();
  const MatrixX<Scalar> raised = gi * h.entries() * gi;  // h^{ab}
  Polynomial<Scalar> pairing(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (raised(a, b) != Scalar(0)) pairing += raised(a, b) * u.derivative(a).derivative(b);

  std::vector<std::vector<Polynomial<Scalar>>> hp(n, std::vector<Polynomial<Scalar>>(n, Polynomial<Scalar>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hp[a][b] = Polynomial<Scalar>::constant(n, h.entries()(a, b));
  const auto bh = bianchi_operator(gi, hp);
  Polynomial<Scalar> bianchi_term(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (gi(a, b) != Scalar(0)) bianchi_term += gi(a, b) * (bh[a] * u.derivative(b));

  Polynomial<Scalar> rhs = hess_coefficient * pairing - bianchi_term;
  Polynomial<Scalar> residual = lhs - rhs;
  return {std::move(lhs), std::move(rhs), std::move(residual)};
}

}  // namespace holonomy
