#include "holonomy/selftest.hpp"

#include <functional>
#include <random>

#include "holonomy/cones.hpp"
#include "holonomy/obstruction.hpp"
#include "holonomy/polyform.hpp"
#include "holonomy/stable_forms.hpp"
#include "holonomy/sym2.hpp"

namespace holonomy {

namespace {

using Q = Rational;

Polynomial<Q> random_quadratic(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  Polynomial<Q> u(n);
  for (int i = 0; i < n; ++i) {
    u += Polynomial<Q>::variable(n, i, Q(num(rng), den(rng)));
    for (int j = i; j < n; ++j)
      u += Polynomial<Q>::variable(n, i, Q(num(rng), den(rng))) * Polynomial<Q>::variable(n, j);
  }
  return u;
}

SelfTestLine check(const std::string& name, const std::function<std::string()>& body) {
  try {
    const std::string failure = body();
    return {name, failure.empty(), failure.empty() ? "residual 0" : failure};
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<SelfTestLine> run_selftest() {
  std::vector<SelfTestLine> out;

  out.push_back(check("g2 metric of phi0 is the identity", [] {
    const auto s = make_g2_structure(reference_phi<Q>());
    return s.g.entries() == MatrixX<Q>::Identity(7, 7) ? "" : "metric differs from identity";
  }));
  out.push_back(check("Theta(phi0) by star and by variation agree", [] {
    const auto phi = reference_phi<Q>();
    return hitchin_dual_3form_7d(phi) == hitchin_dual_3form_7d_variational(phi) ? "" : "dual forms differ";
  }));
  out.push_back(check("Theta(t^3 phi0) = t^4 Theta(phi0)", [] {
    const auto phi = reference_phi<Q>();
    const auto theta = hitchin_dual_3form_7d(phi);
    for (const Q t : {Q(2), Q(3), Q(1, 2)})
      if (!(hitchin_dual_3form_7d(Q(t * t * t) * phi) == Q(t * t * t * t) * theta)) return "fails at t = " + format_scalar(t);
    return std::string();
  }));
  out.push_back(check("su3_assemble(omega0, ReOmega0) compatibility", [] {
    const auto s = su3_assemble(reference_omega<Q>(), reference_re_omega<Q>());
    const auto w3 = wedge(wedge(s.omega, s.omega), s.omega);
    if (!wedge(s.omega, s.re_omega).is_zero()) return "omega ^ ReOmega != 0";
    if (!(Q(1, 4) * wedge(s.re_omega, s.im_omega) == Q(1, 6) * w3)) return "1/4 ReOmega ^ ImOmega != 1/6 omega^3";
    return s.g.entries() == MatrixX<Q>::Identity(6, 6) ? "" : "metric differs from identity";
  }));
  out.push_back(check("g_* kappa = -k kappa on R^6 and R^7", [] {
    for (int n : {6, 7}) {
      const auto g = Metric<Q>::identity(n);
      const auto h = Sym2Tensor<Q>::from_metric(g);
      for (int k = 0; k <= n; ++k)
        for (IndexMask m : form_basis(n, k).masks) {
          std::vector<int> idx;
          for (int i : mask_indices(m)) idx.push_back(i + 1);
          const auto kappa = KForm<Q>::basis(n, idx);
          if (!(sym2_act(h, kappa, g) == Q(-k) * kappa))
            return "fails on e" + format_indices(m) + " in R^" + std::to_string(n);
        }
    }
    return std::string();
  }));
  out.push_back(check("d*(du ^ kappa) = (d*du) kappa - (Hess u)_* kappa, 25 quadratics", [] {
    std::mt19937 rng(20240517);
    const std::vector<std::pair<const char*, KForm<Q>>> kappas = {
        {"phi0", reference_phi<Q>()}, {"omega0", reference_omega<Q>()}, {"ReOmega0", reference_re_omega<Q>()}};
    for (int trial = 0; trial < 25; ++trial)
      for (const auto& [name, kappa] : kappas) {
        const auto u = random_quadratic(kappa.dim(), rng);
        if (!dstar_wedge_check(u, kappa).residual.is_zero())
          return "nonzero residual for kappa = " + std::string(name) + ", trial " + std::to_string(trial);
      }
    return std::string();
  }));
  out.push_back(check("Sym^2 injectivity ranks 27, 8, 12", [] {
    const auto g2 = injectivity_rank(make_g2_structure(reference_phi<Q>()));
    const auto su3 = injectivity_rank(su3_assemble(reference_omega<Q>(), reference_re_omega<Q>()));
    if (g2.rank != 27 || su3[0].rank != 8 || su3[1].rank != 12)
      return "ranks " + std::to_string(g2.rank) + ", " + std::to_string(su3[0].rank) + ", " +
             std::to_string(su3[1].rank);
    return std::string();
  }));
  out.push_back(check("first variation of the Laplacian", [] {
    std::mt19937 rng(7);
    const auto g = Metric<Q>::identity(7);
    for (int a = 0; a < 7; ++a)
      for (int b = a; b < 7; ++b)
        if (!laplacian_variation_check(g, Sym2Tensor<Q>::elementary(7, a, b), random_quadratic(7, rng)).residual.is_zero())
          return "nonzero residual for h = e" + std::to_string(a + 1) + std::to_string(b + 1);
    return std::string();
  }));
  out.push_back(check("nearly Kahler and Calabi-Yau link tables", [] {
    for (const auto& link : {nk_link_preset(), cy_link_preset()}) {
      const auto a = link.audit();
      if (!a.ok()) return link.name() + ": " + a.failures.front();
    }
    const auto nk = pointwise_model_audit(nk_link_preset(), nk_pointwise_model());
    if (!nk.ok()) return nk.failures.front();
    const auto cy = pointwise_model_audit(cy_link_preset(), cy_pointwise_model());
    return cy.ok() ? std::string() : cy.failures.front();
  }));
  out.push_back(check("G2 cone: d phi_C = d psi_C = 0, *phi_C = psi_C", [] {
    const auto link = nk_link_preset();
    const auto phi = g2_cone_form(link);
    const auto psi = g2_cone_dual(link);
    if (!cone_d(phi, link).is_zero()) return "d phi_C != 0";
    if (!cone_d(psi, link).is_zero()) return "d psi_C != 0";
    return cone_hodge(phi, link) == psi ? "" : "*phi_C != psi_C";
  }));
  out.push_back(check("d*(d(r^2/2) ^ phi_C) = -4 phi_C", [] {
    const auto link = nk_link_preset();
    const auto phi = g2_cone_form(link);
    const auto lhs = cone_codifferential(cone_wedge(radial_potential_differential(), phi, link), link);
    return lhs == Q(-4) * phi ? "" : "got " + format_cone_form(lhs, link);
  }));
  out.push_back(check("cone obstruction equations", [] {
    const auto g2 = g2_cone_obstruction_solution(nk_link_preset());
    if (!g2.residual.is_zero()) return g2.equation;
    for (const auto& s : cy_cone_obstruction_solutions(cy_link_preset()))
      if (!s.residual.is_zero()) return s.equation;
    const auto flat = flat_g2_obstruction_solution();
    return flat.residual.zero ? std::string() : flat.residual.equation;
  }));
  return out;
}

std::string format_selftest(const std::vector<SelfTestLine>& lines) {
  std::string out;
  int failed = 0;
  for (const auto& l : lines) {
    out += std::string(l.passed ? "ok   " : "FAIL ") + l.name + ": " + l.detail + "\n";
    failed += !l.passed;
  }
  out += std::to_string(lines.size() - failed) + "/" + std::to_string(lines.size()) + " exact checks passed\n";
  return out;
}

}  // namespace holonomy
