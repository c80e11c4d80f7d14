#include "holonomy/stable_forms.hpp"

#include <cstdio>

namespace holonomy {

namespace {

const LabeledVector& require(const std::optional<LabeledVector>& v, const char* name) {
  if (!v) throw MissingDerivativeData(std::string("missing derivative data: ") + name);
  return *v;
}

// Projection coefficient of x onto y; 0 when y vanishes.
double project(const LabeledVector& x, const LabeledVector& y) {
  const double yy = dot(y, y);
  return yy == 0.0 ? 0.0 : dot(x, y) / yy;
}

}  // namespace

TorsionReport torsion_check(const G2DerivativeData& data, std::optional<double> lambda) {
  const auto& d_phi = require(data.d_phi, "d phi");
  const auto& psi = require(data.psi, "Theta(phi)");
  const auto& d_psi = require(data.d_psi, "d Theta(phi)");

  TorsionReport report;
  report.lines.push_back({"torsion-free", std::hypot(norm(d_phi), norm(d_psi)), std::nullopt});

  // dφ = 4λ Θ(φ); λ by projection unless supplied.
  LabeledVector four_psi = axpy(4.0, psi, {});
  const double lam = lambda ? *lambda : project(d_phi, four_psi);
  const double residual = norm(axpy(-lam, four_psi, d_phi));
  report.lines.push_back({"nearly-parallel", residual, lam});
  return report;
}

TorsionReport torsion_check(const SU3DerivativeData& data, std::optional<double> lambda) {
  const auto& d_omega = require(data.d_omega, "d omega");
  const auto& d_im = require(data.d_im_omega, "d ImOmega");
  const auto& re = require(data.re_omega, "ReOmega");
  const auto& omega_sq = require(data.omega_sq, "omega^2");

  TorsionReport report;
  const double d_re = data.d_re_omega ? norm(*data.d_re_omega) : 0.0;
  if (data.d_re_omega)
    report.lines.push_back({"calabi-yau", std::sqrt(dot(d_omega, d_omega) + d_re * d_re + dot(d_im, d_im)), std::nullopt});

  // dω = −3λ ReΩ fixes λ; dImΩ = 2λω² is then a residual check at that scale.
  const LabeledVector minus_three_re = axpy(-3.0, re, {});
  const double lam = lambda ? *lambda : project(d_omega, minus_three_re);
  const double r1 = norm(axpy(-lam, minus_three_re, d_omega));
  const double r2 = norm(axpy(-2.0 * lam, omega_sq, d_im));
  report.lines.push_back({"nearly-kahler", std::hypot(r1, r2), lam});
  return report;
}

std::string format_report(const TorsionReport& report) {
  std::string out;
  for (const auto& line : report.lines) {
    char buf[160];
    if (line.lambda)
      std::snprintf(buf, sizeof buf, "%s: residual = %.6g, lambda = %.6g\n", line.condition.c_str(), line.residual,
                    *line.lambda);
    else
      std::snprintf(buf, sizeof buf, "%s: residual = %.6g\n", line.condition.c_str(), line.residual);
    out += buf;
  }
  return out;
}

}  // namespace holonomy
