#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <random>

#include "holonomy/stable_forms.hpp"
#include "oracle.hpp"

using namespace holonomy;
using Q = Rational;

namespace {

oracle::Form<Q> phi0_oracle() {
  oracle::Form<Q> phi;
  for (auto [idx, c] : std::vector<std::pair<std::vector<int>, int>>{
           {{1, 2, 3}, 1}, {{1, 4, 5}, 1}, {{1, 6, 7}, 1}, {{2, 4, 6}, 1}, {{2, 5, 7}, -1}, {{3, 4, 7}, -1}, {{3, 5, 6}, -1}})
    phi = oracle::plus(phi, oracle::basis<Q>(idx, Q(c)));
  return phi;
}

// (e1 + i e2)(e3 + i e4)(e5 + i e6).
std::pair<oracle::Form<Q>, oracle::Form<Q>> omega0_complex() {
  std::vector<std::pair<oracle::Form<Q>, oracle::Form<Q>>> f;
  for (int j = 0; j < 3; ++j) f.push_back({oracle::basis<Q>({2 * j + 1}), oracle::basis<Q>({2 * j + 2})});
  return oracle::complex_wedge(f);
}

oracle::Form<Q> omega0_oracle() {
  return oracle::plus(oracle::plus(oracle::basis<Q>({1, 2}), oracle::basis<Q>({3, 4})), oracle::basis<Q>({5, 6}));
}

MatrixX<double> well_conditioned(std::mt19937& rng, bool flip) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    MatrixX<double> A = MatrixX<double>::Identity(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) A(i, j) += 0.3 * u(rng);
    if (flip) A.row(0) *= -1.0;
    Eigen::JacobiSVD<MatrixX<double>> svd(A);
    const auto s = svd.singularValues();
    if (s(0) / s(6) < 10.0) return A;
  }
}

}  // namespace

TEST_CASE("reference G2 form") {
  CHECK(oracle::from_library(reference_phi<Q>()) == phi0_oracle());
  const auto s = stability_7d(reference_phi<Q>());
  CHECK(s.kind == G2Class::StableG2);
  CHECK(s.pairing == oracle::g2_pairing(phi0_oracle()));
  CHECK(s.metric->entries() == MatrixX<Q>::Identity(7, 7));
  CHECK(s.root == 1);
}

TEST_CASE("Theta(phi0) is the Hodge star of phi0") {
  const auto theta = hitchin_dual_3form_7d(reference_phi<Q>());
  CHECK(oracle::from_library(theta) == oracle::hodge(phi0_oracle(), 7));
  CHECK(hitchin_dual_3form_7d_variational(reference_phi<Q>()) == theta);
}

TEST_CASE("Theta is homogeneous of degree 4/3") {
  const auto phi = reference_phi<Q>();
  const auto theta = hitchin_dual_3form_7d(phi);
  for (const Q t : {Q(2), Q(3), Q(1, 2), Q(-2)}) {
    CHECK(hitchin_dual_3form_7d(Q(t * t * t) * phi) == Q(t * t * t * t) * theta);
    CHECK(make_g2_structure(Q(t * t * t) * phi).g.entries() == Q(t * t) * MatrixX<Q>::Identity(7, 7));
  }
}

TEST_CASE("split and degenerate 3-forms in 7d") {
  // φ₀ after e4..e7 ↦ i e4..i e7.
  oracle::Form<Q> s;
  for (auto [idx, c] : std::vector<std::pair<std::vector<int>, int>>{
           {{1, 2, 3}, 1}, {{1, 4, 5}, -1}, {{1, 6, 7}, -1}, {{2, 4, 6}, -1}, {{2, 5, 7}, 1}, {{3, 4, 7}, 1}, {{3, 5, 6}, 1}})
    s = oracle::plus(s, oracle::basis<Q>(idx, Q(c)));
  const MatrixX<double> B = oracle::g2_pairing(s).unaryExpr([](const Q& x) { return x.convert_to<double>(); });
  Eigen::SelfAdjointEigenSolver<MatrixX<double>> eig(B);
  const int negative = static_cast<int>((eig.eigenvalues().array() < 0).count());
  REQUIRE(negative != 0);
  REQUIRE(negative != 7);
  CHECK(stability_7d(oracle::to_library(s, 7, 3)).kind == G2Class::StableSplit);
  CHECK_THROWS_AS(make_g2_structure(oracle::to_library(s, 7, 3)), ComputationError);

  CHECK(stability_7d(KFormQ::basis(7, {1, 2, 3})).kind == G2Class::NotStable);
  CHECK_THROWS_AS(make_g2_structure(KFormQ::basis(7, {1, 2, 3})), NotStable);
  CHECK_THROWS_AS(stability_7d(KFormQ::basis(6, {1, 2, 3})), DimensionMismatch);
}

TEST_CASE("GL equivariance of the G2 metric and dual, float path") {
  std::mt19937 rng(2024);
  const auto phi = oracle::from_library(reference_phi<double>());
  const auto theta = oracle::hodge(phi, 7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixX<double> A = well_conditioned(rng, trial % 2 == 1);
    const auto pulled = oracle::to_library(oracle::pullback(A, phi, 7, 3), 7, 3);
    const auto s = make_g2_structure(pulled);
    const MatrixX<double> expected_g = A.transpose() * A;
    worst = std::max(worst, (s.g.entries() - expected_g).cwiseAbs().maxCoeff());
    worst = std::max(worst, oracle::max_abs_diff(oracle::from_library(s.psi), oracle::pullback(A, theta, 7, 4)));
    worst = std::max(worst, oracle::max_abs_diff(oracle::from_library(hitchin_dual_3form_7d_variational(pulled)),
                                                 oracle::pullback(A, theta, 7, 4)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("exact equivariance on a rational map") {
  MatrixX<Q> A = MatrixX<Q>::Identity(7, 7);
  A(0, 1) = Q(1, 2);
  A(3, 5) = Q(-2, 3);
  A(6, 2) = Q(1);
  const auto s = make_g2_structure(pullback(A, reference_phi<Q>()));
  CHECK(s.g.entries() == MatrixX<Q>(A.transpose() * A));
  CHECK(s.psi == pullback(A, hitchin_dual_3form_7d(reference_phi<Q>())));
}

TEST_CASE("reference SU(3) forms follow dz1 dz2 dz3") {
  const auto [re, im] = omega0_complex();
  CHECK(oracle::from_library(reference_re_omega<Q>()) == re);
  CHECK(oracle::from_library(reference_im_omega<Q>()) == im);
  CHECK(oracle::from_library(reference_omega<Q>()) == omega0_oracle());
}

TEST_CASE("Hitchin invariant and complex structure of ReOmega0") {
  const auto [re, im] = omega0_complex();
  const MatrixX<Q> K = oracle::hitchin_k(re);
  CHECK(hitchin_endomorphism(reference_re_omega<Q>()) == K);
  CHECK(hitchin_invariant(reference_re_omega<Q>()) == Q((K * K).trace()) / 6);
  const auto s = stability_3form_6d(reference_re_omega<Q>());
  CHECK(s.kind == SL3Class::StableSL3C);
  CHECK(s.invariant < 0);
  // J e1 = e2 for the complex coordinate z1 = x1 + i x2.
  CHECK((*s.J)(1, 0) == 1);
  CHECK(*s.J * *s.J == MatrixX<Q>(-MatrixX<Q>::Identity(6, 6)));
  CHECK(oracle::from_library(*s.dual) == im);
}

TEST_CASE("split and degenerate 3-forms in 6d") {
  const auto rho = KFormQ::basis(6, {1, 2, 3}) + KFormQ::basis(6, {4, 5, 6});
  const auto s = stability_3form_6d(rho);
  CHECK(s.kind == SL3Class::StableSL3RxSL3R);
  CHECK(s.invariant > 0);
  CHECK(stability_3form_6d(KFormQ::basis(6, {1, 2, 3})).kind == SL3Class::NotStable);
}

TEST_CASE("su3_assemble on the standard pair") {
  const auto s = su3_assemble(reference_omega<Q>(), reference_re_omega<Q>());
  const auto w = omega0_oracle();
  const auto [re, im] = omega0_complex();
  CHECK(oracle::wedge(w, re).empty());
  const auto vol = oracle::basis<Q>({1, 2, 3, 4, 5, 6});
  CHECK(oracle::scaled(oracle::wedge(re, im), Q(1, 4)) == vol);
  CHECK(oracle::scaled(oracle::wedge(oracle::wedge(w, w), w), Q(1, 6)) == vol);
  CHECK(s.g.entries() == MatrixX<Q>::Identity(6, 6));
  CHECK(oracle::from_library(s.im_omega) == im);
  CHECK(oracle::from_library(hitchin_dual_2form_6d(reference_omega<Q>())) ==
        oracle::scaled(oracle::wedge(w, w), Q(1, 2)));
}

TEST_CASE("su3_assemble rejects incompatible pairs") {
  try {
    su3_assemble(reference_omega<Q>(), Q(2) * reference_re_omega<Q>());
    FAIL("expected a compatibility violation");
  } catch (const CompatibilityViolation& e) {
    CHECK(e.constraint() == "1/4 ReOmega ^ ImOmega = 1/6 omega^3");
    CHECK(e.residual() > 0);
  }
  const auto bad_omega = reference_omega<Q>() + KFormQ::basis(6, {3, 5});
  try {
    su3_assemble(bad_omega, reference_re_omega<Q>());
    FAIL("expected a compatibility violation");
  } catch (const CompatibilityViolation& e) {
    CHECK(e.constraint() == "omega ^ ReOmega = 0");
  }
  CHECK_THROWS_AS(su3_assemble(KFormQ::basis(6, {1, 2}), reference_re_omega<Q>()), NotStable);
  CHECK_THROWS_AS(su3_assemble(reference_omega<Q>(), KFormQ::basis(6, {1, 2, 3}) + KFormQ::basis(6, {4, 5, 6})),
                  NotStable);
}

TEST_CASE("su3_assemble float path within tolerance") {
  const auto s = su3_assemble(reference_omega<double>(), reference_re_omega<double>());
  CHECK((s.g.entries() - MatrixX<double>::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("torsion classification from labeled derivative data") {
  LabeledVector psi{{"a", 1.0}, {"b", -2.0}};
  G2DerivativeData np{axpy(4.0 * 3.0, psi, {}), psi, LabeledVector{}};
  const auto r = torsion_check(np);
  CHECK(r.line("torsion-free").residual > 0);
  CHECK(r.line("nearly-parallel").residual == doctest::Approx(0.0));
  CHECK(*r.line("nearly-parallel").lambda == doctest::Approx(3.0));

  G2DerivativeData tf{LabeledVector{}, psi, LabeledVector{}};
  CHECK(torsion_check(tf).line("torsion-free").residual == 0.0);

  CHECK_THROWS_AS(torsion_check(G2DerivativeData{std::nullopt, psi, LabeledVector{}}), MissingDerivativeData);

  LabeledVector re{{"ReOmega", 1.0}}, w2{{"omega2", 1.0}};
  SU3DerivativeData nk{axpy(-3.0, re, {}), LabeledVector{}, axpy(2.0, w2, {}), re, w2};
  const auto rn = torsion_check(nk);
  CHECK(rn.line("nearly-kahler").residual == doctest::Approx(0.0));
  CHECK(*rn.line("nearly-kahler").lambda == doctest::Approx(1.0));
  CHECK(rn.line("calabi-yau").residual > 0);
  SU3DerivativeData cy{LabeledVector{}, LabeledVector{}, LabeledVector{}, re, w2};
  CHECK(torsion_check(cy).line("calabi-yau").residual == 0.0);
}
