#pragma once

// Stable forms in dimensions 6 and 7: orbit classification, induced metrics,
// the Hitchin duals Θ (7d) and Φ (6d), SU(3) pairs, and torsion residuals.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holonomy/kform.hpp"

namespace holonomy {

// ---------------------------------------------------------------- references

template <class Scalar>
KForm<Scalar> reference_phi() {
  KForm<Scalar> phi(7, 3);
  const std::vector<std::pair<std::vector<int>, int>> terms = {
      {{1, 2, 3}, 1}, {{1, 4, 5}, 1}, {{1, 6, 7}, 1}, {{2, 4, 6}, 1},
      {{2, 5, 7}, -1}, {{3, 4, 7}, -1}, {{3, 5, 6}, -1}};
  for (const auto& [idx, c] : terms) phi += KForm<Scalar>::basis(7, idx, Scalar(c));
  return phi;
}

template <class Scalar>
KForm<Scalar> reference_omega() {
  return KForm<Scalar>::basis(6, {1, 2}) + KForm<Scalar>::basis(6, {3, 4}) + KForm<Scalar>::basis(6, {5, 6});
}

template <class Scalar>
KForm<Scalar> reference_re_omega() {
  return KForm<Scalar>::basis(6, {1, 3, 5}) - KForm<Scalar>::basis(6, {1, 4, 6}) -
         KForm<Scalar>::basis(6, {2, 3, 6}) - KForm<Scalar>::basis(6, {2, 4, 5});
}

template <class Scalar>
KForm<Scalar> reference_im_omega() {
  return KForm<Scalar>::basis(6, {1, 3, 6}) + KForm<Scalar>::basis(6, {1, 4, 5}) +
         KForm<Scalar>::basis(6, {2, 3, 5}) - KForm<Scalar>::basis(6, {2, 4, 6});
}

/// The complex structure with J e_1 = e_2, J e_3 = e_4, J e_5 = e_6.
template <class Scalar>
MatrixX<Scalar> standard_complex_structure() {
  MatrixX<Scalar> J = MatrixX<Scalar>::Zero(6, 6);
  for (int i = 0; i < 6; i += 2) {
    J(i + 1, i) = Scalar(1);
    J(i, i + 1) = Scalar(-1);
  }
  return J;
}

// ------------------------------------------------------------------ 7d

enum class G2Class { StableG2, StableSplit, NotStable };

inline const char* to_string(G2Class c) {
  switch (c) {
    case G2Class::StableG2: return "StableG2";
    case G2Class::StableSplit: return "StableSplit";
    case G2Class::NotStable: return "NotStable";
  }
  return "?";
}

/// B(u,v)·e^{1..7} = (1/6) ι_uφ ∧ ι_vφ ∧ φ.
template <class Scalar>
MatrixX<Scalar> g2_pairing(const KForm<Scalar>& phi) {
  if (phi.dim() != 7 || phi.degree() != 3) throw DimensionMismatch("expected a 3-form on R^7");
  std::vector<KForm<Scalar>> contracted;
  for (int i = 0; i < 7; ++i) contracted.push_back(contract(unit_vector<Scalar>(7, i), phi));
  MatrixX<Scalar> B(7, 7);
  for (int i = 0; i < 7; ++i) {
    const KForm<Scalar> left = wedge(contracted[i], phi);
    for (int j = i; j < 7; ++j) B(i, j) = B(j, i) = top_coefficient(wedge(left, contracted[j])) / Scalar(6);
  }
  return B;
}

template <class Scalar>
struct G2Stability {
  G2Class kind = G2Class::NotStable;
  MatrixX<Scalar> pairing;
  /// det(B)^{1/9}; vol_φ = root · e^{1..7}.
  Scalar root = Scalar(0);
  /// B / root; Riemannian exactly for StableG2.
  std::optional<Metric<Scalar>> metric;
};

template <class Scalar>
G2Stability<Scalar> stability_7d(const KForm<Scalar>& phi) {
  G2Stability<Scalar> out;
  out.pairing = g2_pairing(phi);
  const Scalar det = determinant(out.pairing);
  const double scale = std::pow(std::max(1e-300, to_double(out.pairing.cwiseAbs().maxCoeff())), 7);
  if (is_zero(det, is_exact_v<Scalar> ? 0.0 : 1e-12 * scale)) return out;
  out.root = real_root(det, 9);
  const MatrixX<Scalar> g = out.pairing / out.root;
  // The stabilizer is compact exactly when the normalized pairing is definite.
  const int positive = signature(g).first;
  out.metric = Metric<Scalar>(g, sign_of(out.root), 1e-9);
  out.kind = (positive == 7) ? G2Class::StableG2 : G2Class::StableSplit;
  return out;
}

template <class Scalar>
struct G2Structure {
  KForm<Scalar> phi;
  Metric<Scalar> g;
  Scalar volume;  // coefficient of vol_φ on e^{1..7}
  KForm<Scalar> psi;
};

/// Θ(φ) = *_{g_φ} φ.
template <class Scalar>
KForm<Scalar> hitchin_dual_3form_7d(const KForm<Scalar>& phi) {
  const auto s = stability_7d(phi);
  if (s.kind != G2Class::StableG2) throw NotStable(std::string("3-form is ") + to_string(s.kind));
  return hodge_star(phi, *s.metric);
}

/// Θ(φ) from the derivative of the volume functional: e^I ∧ Θ(φ) = 3 ∂V/∂φ_I e^{1..7},
/// with V = det(B)^{1/9} and ∂V = (V/9) tr(B⁻¹ ∂B). Independent of the Hodge star.
template <class Scalar>
KForm<Scalar> hitchin_dual_3form_7d_variational(const KForm<Scalar>& phi) {
  const auto s = stability_7d(phi);
  if (s.kind != G2Class::StableG2) throw NotStable(std::string("3-form is ") + to_string(s.kind));
  const MatrixX<Scalar> Binv = inverse(s.pairing);
  std::vector<KForm<Scalar>> iphi;
  for (int i = 0; i < 7; ++i) iphi.push_back(contract(unit_vector<Scalar>(7, i), phi));
  const auto& b3 = form_basis(7, 3);
  KForm<Scalar> theta(7, 4);
  for (int I = 0; I < b3.size(); ++I) {
    KForm<Scalar> eI(7, 3);
    eI.coeffs()(I) = Scalar(1);
    std::vector<KForm<Scalar>> ieI;
    for (int i = 0; i < 7; ++i) ieI.push_back(contract(unit_vector<Scalar>(7, i), eI));
    // tr(B⁻¹ ∂B) = Σ_ij B⁻¹_ji ∂B_ij
    Scalar trace(0);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        if (Binv(j, i) == Scalar(0)) continue;
        const Scalar dB = top_coefficient(wedge(wedge(ieI[i], iphi[j]), phi)) +
                          top_coefficient(wedge(wedge(iphi[i], ieI[j]), phi)) +
                          top_coefficient(wedge(wedge(iphi[i], iphi[j]), eI));
        trace += Binv(j, i) * dB / Scalar(6);
      }
    const Scalar dV = s.root * trace / Scalar(9);
    const IndexMask complement = full_mask(7) & ~b3.masks[I];
    theta.add_to(complement, Scalar(3 * wedge_sign(b3.masks[I], complement)) * dV);
  }
  return theta;
}

template <class Scalar>
G2Structure<Scalar> make_g2_structure(const KForm<Scalar>& phi) {
  const auto s = stability_7d(phi);
  if (s.kind != G2Class::StableG2) throw NotStable(std::string("3-form is ") + to_string(s.kind));
  return G2Structure<Scalar>{phi, *s.metric, s.root, hodge_star(phi, *s.metric)};
}

// ------------------------------------------------------------------ 6d

/// Φ(ω) = ½ ω∧ω for a non-degenerate 2-form on R^6.
template <class Scalar>
KForm<Scalar> hitchin_dual_2form_6d(const KForm<Scalar>& omega, double tol = 0.0) {
  if (omega.dim() != 6 || omega.degree() != 2) throw DimensionMismatch("expected a 2-form on R^6");
  const KForm<Scalar> sq = wedge(omega, omega);
  if (is_zero(top_coefficient(wedge(sq, omega)), tol)) throw NotStable("2-form is degenerate (ω³ = 0)");
  return Scalar(1) / Scalar(2) * sq;
}

enum class SL3Class { StableSL3C, StableSL3RxSL3R, NotStable };

inline const char* to_string(SL3Class c) {
  switch (c) {
    case SL3Class::StableSL3C: return "StableSL3C";
    case SL3Class::StableSL3RxSL3R: return "StableSL3RxSL3R";
    case SL3Class::NotStable: return "NotStable";
  }
  return "?";
}

/// K_ρ(v) defined by ι_{K v} e^{1..6} = ι_vρ ∧ ρ (columns are K e_a).
template <class Scalar>
MatrixX<Scalar> hitchin_endomorphism(const KForm<Scalar>& rho) {
  if (rho.dim() != 6 || rho.degree() != 3) throw DimensionMismatch("expected a 3-form on R^6");
  const auto& b5 = form_basis(6, 5);
  MatrixX<Scalar> K(6, 6);
  for (int a = 0; a < 6; ++a) {
    const KForm<Scalar> five = wedge(contract(unit_vector<Scalar>(6, a), rho), rho);
    for (int b = 0; b < 6; ++b) {
      const IndexMask complement = full_mask(6) & ~(IndexMask{1} << b);
      const Scalar c = five.coeffs()(b5.position(complement));
      K(b, a) = (b % 2) ? Scalar(-c) : c;
    }
  }
  return K;
}

/// λ(ρ) = tr(K_ρ²)/6; negative exactly on the SL(3,C) orbit.
template <class Scalar>
Scalar hitchin_invariant(const KForm<Scalar>& rho) {
  const MatrixX<Scalar> K = hitchin_endomorphism(rho);
  return (K * K).trace() / Scalar(6);
}

/// ρ̂(u,v,w) = −ρ(Ju,v,w): the imaginary part making ρ + iρ̂ of type (3,0).
template <class Scalar>
KForm<Scalar> rotate_first_slot(const KForm<Scalar>& rho, const MatrixX<Scalar>& J) {
  const auto& b = rho.basis_table();
  KForm<Scalar> out(rho.dim(), rho.degree());
  const int n = rho.dim();
  for (int i = 0; i < b.size(); ++i) {
    const auto idx = mask_indices(b.masks[i]);
    MatrixX<Scalar> vectors = MatrixX<Scalar>::Zero(n, rho.degree());
    vectors.col(0) = J.col(idx[0]);
    for (int s = 1; s < rho.degree(); ++s) vectors(idx[s], s) = Scalar(1);
    out.coeffs()(i) = -evaluate(rho, vectors);
  }
  return out;
}

template <class Scalar>
struct SL3Stability {
  SL3Class kind = SL3Class::NotStable;
  Scalar invariant = Scalar(0);
  /// Almost complex structure (standard orientation), present for StableSL3C.
  std::optional<MatrixX<Scalar>> J;
  std::optional<KForm<Scalar>> dual;
};

template <class Scalar>
SL3Stability<Scalar> stability_3form_6d(const KForm<Scalar>& rho, double tol = 0.0) {
  SL3Stability<Scalar> out;
  const MatrixX<Scalar> K = hitchin_endomorphism(rho);
  out.invariant = (K * K).trace() / Scalar(6);
  if (is_zero(out.invariant, tol)) return out;
  if (sign_of(out.invariant) > 0) {
    out.kind = SL3Class::StableSL3RxSL3R;
    return out;
  }
  out.kind = SL3Class::StableSL3C;
  // Sign fixed so that ReΩ₀ yields J e_1 = e_2 with the standard orientation.
  const MatrixX<Scalar> J = -K / sqrt_of(Scalar(-out.invariant));
  out.J = J;
  out.dual = rotate_first_slot(rho, J);
  return out;
}

template <class Scalar>
struct SU3Structure {
  KForm<Scalar> omega;
  KForm<Scalar> re_omega;
  KForm<Scalar> im_omega;
  Metric<Scalar> g;
  MatrixX<Scalar> J;
};

/// The matrix W_ab = ω(e_a, e_b).
template <class Scalar>
MatrixX<Scalar> two_form_matrix(const KForm<Scalar>& omega) {
  const int n = omega.dim();
  MatrixX<Scalar> W = MatrixX<Scalar>::Zero(n, n);
  const auto& b = omega.basis_table();
  for (int i = 0; i < b.size(); ++i) {
    const auto idx = mask_indices(b.masks[i]);
    W(idx[0], idx[1]) = omega.coeffs()(i);
    W(idx[1], idx[0]) = -omega.coeffs()(i);
  }
  return W;
}

/// Relative tolerance for float compatibility checks; rationals are checked exactly.
inline constexpr double kCompatibilityTolerance = 1e-9;

template <class Scalar>
SU3Structure<Scalar> su3_assemble(const KForm<Scalar>& omega, const KForm<Scalar>& re_omega) {
  if (omega.dim() != 6 || omega.degree() != 2 || re_omega.dim() != 6 || re_omega.degree() != 3)
    throw DimensionMismatch("expected a 2-form and a 3-form on R^6");
  const double tol_scale = is_exact_v<Scalar> ? 0.0 : kCompatibilityTolerance;
  const KForm<Scalar> omega2 = wedge(omega, omega);
  const Scalar omega3 = top_coefficient(wedge(omega2, omega));
  if (is_zero(omega3, tol_scale * std::pow(max_abs_coeff(omega), 3))) throw NotStable("ω is degenerate (ω³ = 0)");
  auto rho = stability_3form_6d(re_omega, tol_scale * std::pow(max_abs_coeff(re_omega), 4));
  if (rho.kind != SL3Class::StableSL3C)
    throw NotStable(std::string("ReΩ is ") + to_string(rho.kind) + ", expected StableSL3C");
  MatrixX<Scalar> J = *rho.J;
  KForm<Scalar> im = *rho.dual;
  // The orientation is the one of ω³; flipping it conjugates J.
  if (sign_of(omega3) < 0) {
    J = -J;
    im = -im;
  }

  const KForm<Scalar> first = wedge(omega, re_omega);
  const double first_scale = max_abs_coeff(omega) * max_abs_coeff(re_omega);
  if (!first.is_zero(tol_scale * first_scale))
    throw CompatibilityViolation("omega ^ ReOmega = 0", max_abs_coeff(first));
  const Scalar lhs = top_coefficient(wedge(re_omega, im)) / Scalar(4);
  const Scalar rhs = omega3 / Scalar(6);
  const double norm_scale = std::max(std::abs(to_double(lhs)), std::abs(to_double(rhs)));
  if (!is_zero(Scalar(lhs - rhs), tol_scale * norm_scale))
    throw CompatibilityViolation("1/4 ReOmega ^ ImOmega = 1/6 omega^3", std::abs(to_double(Scalar(lhs - rhs))));

  const MatrixX<Scalar> W = two_form_matrix(omega);
  MatrixX<Scalar> g = W * J;
  if (!is_symmetric(g, is_exact_v<Scalar> ? 0.0 : 1e-9 * std::max(1.0, max_abs_coeff(omega))))
    throw CompatibilityViolation("omega is not J-invariant", 0.0);
  if constexpr (!is_exact_v<Scalar>) g = (g + g.transpose()) / 2.0;
  if (!holonomy::is_positive_definite(g)) throw IndefiniteMetric("ω(·, J·) is indefinite");
  return SU3Structure<Scalar>{omega, re_omega, im, Metric<Scalar>(g, sign_of(omega3)), J};
}

// ------------------------------------------------------------------ torsion

/// Sparse coefficient vector with human-readable labels (basis tuple plus
/// monomial, or link generator names). Used to compare derivative data.
using LabeledVector = std::map<std::string, double>;

inline LabeledVector axpy(double a, const LabeledVector& x, const LabeledVector& y) {
  LabeledVector out = y;
  for (const auto& [k, v] : x) out[k] += a * v;
  return out;
}

inline double dot(const LabeledVector& x, const LabeledVector& y) {
  double s = 0.0;
  for (const auto& [k, v] : x) {
    const auto it = y.find(k);
    if (it != y.end()) s += v * it->second;
  }
  return s;
}

inline double norm(const LabeledVector& x) { return std::sqrt(dot(x, x)); }

/// Exterior-derivative data for a G₂ structure: dφ, Θ(φ), dΘ(φ).
struct G2DerivativeData {
  std::optional<LabeledVector> d_phi;
  std::optional<LabeledVector> psi;
  std::optional<LabeledVector> d_psi;
};

/// dω, dReΩ, dImΩ and the forms ReΩ, ω² for an SU(3) structure.
struct SU3DerivativeData {
  std::optional<LabeledVector> d_omega;
  std::optional<LabeledVector> d_re_omega;
  std::optional<LabeledVector> d_im_omega;
  std::optional<LabeledVector> re_omega;
  std::optional<LabeledVector> omega_sq;
};

struct TorsionLine {
  std::string condition;
  double residual = 0.0;
  std::optional<double> lambda;
};

struct TorsionReport {
  std::vector<TorsionLine> lines;

  const TorsionLine& line(const std::string& condition) const {
    for (const auto& l : lines)
      if (l.condition == condition) return l;
    throw ValidationError("no torsion line named " + condition);
  }
};

TorsionReport torsion_check(const G2DerivativeData& data, std::optional<double> lambda = std::nullopt);
TorsionReport torsion_check(const SU3DerivativeData& data, std::optional<double> lambda = std::nullopt);

std::string format_report(const TorsionReport& report);

}  // namespace holonomy
