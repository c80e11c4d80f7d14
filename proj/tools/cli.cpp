#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "holonomy/cones.hpp"
#include "holonomy/io.hpp"
#include "holonomy/obstruction.hpp"
#include "holonomy/radial.hpp"
#include "holonomy/selftest.hpp"
#include "holonomy/stable_forms.hpp"
#include "holonomy/sym2.hpp"

namespace holonomy {

namespace {

enum class Precision { Exact, F64 };

Precision resolve_precision(const std::string& flag) {
  std::string value = flag;
  if (value.empty())
    if (const char* env = std::getenv("HOLONOMY_LAB_PRECISION")) value = env;
  if (value.empty() || value == "exact") return Precision::Exact;
  if (value == "f64") return Precision::F64;
  throw ValidationError("precision must be 'exact' or 'f64', got '" + value + "'");
}

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", x == 0.0 ? 0.0 : x);
  return buf;
}

template <class Scalar>
bool is_identity(const MatrixX<Scalar>& m) {
  const MatrixX<Scalar> diff = m - MatrixX<Scalar>::Identity(m.rows(), m.cols());
  for (int i = 0; i < diff.rows(); ++i)
    for (int j = 0; j < diff.cols(); ++j)
      if (!is_zero(diff(i, j), 1e-12)) return false;
  return true;
}

template <class Scalar>
std::string metric_line(const MatrixX<Scalar>& g) {
  return is_identity(g) ? "metric = identity\n" : "metric =\n" + format_symmetric(g);
}

// ------------------------------------------------------------------ stable / dual

template <class Scalar>
void run_stable(const std::string& path, std::ostream& out) {
  const auto form = load_form<Scalar>(path);
  if (form.dim() == 7 && form.degree() == 3) {
    const auto s = stability_7d(form);
    out << to_string(s.kind);
    if (s.metric) out << "; " << metric_line(s.metric->entries());
    else out << "\n";
    if (s.kind != G2Class::NotStable) out << "volume = " << format_scalar(s.root) << "\n";
    return;
  }
  if (form.dim() == 6 && form.degree() == 3) {
    const double tol = is_exact_v<Scalar> ? 0.0 : 1e-12 * std::pow(max_abs_coeff(form), 4);
    const auto s = stability_3form_6d(form, tol);
    out << to_string(s.kind) << "; lambda = " << format_scalar(s.invariant) << "\n";
    if (s.J) out << "J =\n" << format_matrix(*s.J);
    return;
  }
  if (form.dim() == 6 && form.degree() == 2) {
    const Scalar top = top_coefficient(wedge(wedge(form, form), form));
    out << (is_zero(top, 1e-12) ? "Degenerate" : "Nondegenerate") << "; omega^3 = " << format_scalar(top) << " e123456\n";
    return;
  }
  throw ValidationError("stable expects a 3-form on R^7, or a 2- or 3-form on R^6");
}

template <class Scalar>
void run_dual(const std::string& path, const std::string& out_path, std::ostream& out) {
  const auto form = load_form<Scalar>(path);
  KForm<Scalar> dual;
  if (form.dim() == 7 && form.degree() == 3) {
    dual = hitchin_dual_3form_7d(form);
  } else if (form.dim() == 6 && form.degree() == 3) {
    const double tol = is_exact_v<Scalar> ? 0.0 : 1e-12 * std::pow(max_abs_coeff(form), 4);
    const auto s = stability_3form_6d(form, tol);
    if (!s.dual) throw NotStable(std::string("3-form is ") + to_string(s.kind) + ", no complex dual");
    dual = *s.dual;
  } else if (form.dim() == 6 && form.degree() == 2) {
    dual = hitchin_dual_2form_6d(form, is_exact_v<Scalar> ? 0.0 : 1e-12);
  } else {
    throw ValidationError("dual expects a 3-form on R^7, or a 2- or 3-form on R^6");
  }
  if (!out_path.empty()) write_text_file(out_path, format_form(dual));
  out << format_form(dual);
}

// ------------------------------------------------------------------ su3 / sym2

template <class Scalar>
std::pair<KForm<Scalar>, KForm<Scalar>> su3_inputs(const std::string& bundle, const std::string& omega,
                                                   const std::string& re_omega) {
  if (!bundle.empty()) {
    const auto forms = parse_bundle<Scalar>(read_text_file(bundle));
    for (const char* key : {"omega", "ReOmega"})
      if (!forms.count(key)) throw ValidationError(std::string("bundle needs a [") + key + "] section");
    return {forms.at("omega"), forms.at("ReOmega")};
  }
  if (omega.empty() || re_omega.empty()) throw ValidationError("give --bundle, or both --omega and --re-omega");
  return {load_form<Scalar>(omega), load_form<Scalar>(re_omega)};
}

template <class Scalar>
void run_su3(const std::string& bundle, const std::string& omega, const std::string& re_omega,
             const std::string& out_path, std::ostream& out) {
  const auto [w, re] = su3_inputs<Scalar>(bundle, omega, re_omega);
  const auto s = su3_assemble(w, re);
  out << "omega ^ ReOmega = 0: ok\n";
  out << "1/4 ReOmega ^ ImOmega = 1/6 omega^3: ok\n";
  out << metric_line(s.g.entries());
  out << "J =\n" << format_matrix(s.J);
  const std::map<std::string, KForm<Scalar>> bundle_out = {{"omega", s.omega}, {"ReOmega", s.re_omega}, {"ImOmega", s.im_omega}};
  if (!out_path.empty()) write_text_file(out_path, format_bundle(bundle_out));
  out << "[ImOmega]\n" << format_form(s.im_omega);
}

template <class Scalar>
void run_sym2_action(const std::string& form_path, const std::string& tensor_path, const std::string& metric_path,
                     std::ostream& out) {
  const auto kappa = load_form<Scalar>(form_path);
  const auto h = Sym2Tensor<Scalar>(parse_symmetric<Scalar>(read_text_file(tensor_path)).entries, 1e-12);
  const auto g = metric_path.empty() ? Metric<Scalar>::identity(kappa.dim())
                                     : parse_metric<Scalar>(read_text_file(metric_path));
  out << format_form(sym2_act(h, kappa, g));
}

void run_sym2_ranks(std::ostream& out) {
  auto line = [&](const RankReport& r) {
    out << r.map << ": rank " << r.rank << " of " << r.domain_dim << (r.injective() ? " (injective)" : "") << "\n";
  };
  const auto g2 = make_g2_structure(reference_phi<Rational>());
  line(injectivity_rank(g2));
  line(full_sym2_rank(g2));
  for (const auto& r : injectivity_rank(su3_assemble(reference_omega<Rational>(), reference_re_omega<Rational>())))
    line(r);
}

// ------------------------------------------------------------------ cone

std::string status(const ConeForm& residual) { return residual.is_zero() ? "0" : "nonzero"; }

// "d nu = ..." names its unknown nu.
std::string unknown_of(const std::string& equation) {
  const auto end = equation.find(' ', 2);
  return equation.substr(2, end == std::string::npos ? std::string::npos : end - 2);
}

void run_cone(const std::string& link_path, const std::string& preset, std::ostream& out) {
  const LinkComplex link = !link_path.empty() ? load_link_complex(link_path)
                          : preset == "cy"    ? cy_link_preset()
                                              : nk_link_preset();
  const auto audit = link.audit();
  out << "link " << link.name() << " (dim " << link.link_dim() << "): audit " << (audit.ok() ? "ok" : "FAILED") << ", "
      << audit.checks << " checks\n";
  for (const auto& f : audit.failures) out << "  " << f << "\n";
  if (!audit.ok()) throw ComputationError("link tables fail the audit");

  if (link.has_generator("theta")) {
    const auto cy = cy_cone_forms(link);
    out << "omega_C = " << format_cone_form(cy.omega, link) << "\n";
    out << "ReOmega_C = " << format_cone_form(cy.re_omega, link) << "\n";
    out << "ImOmega_C = " << format_cone_form(cy.im_omega, link) << "\n";
    out << "d omega_C = " << status(cone_d(cy.omega, link)) << ", d ReOmega_C = " << status(cone_d(cy.re_omega, link))
        << ", d ImOmega_C = " << status(cone_d(cy.im_omega, link)) << "\n";
    for (const auto& s : cy_cone_obstruction_solutions(link))
      out << s.equation << ": " << unknown_of(s.equation) << " = " << format_cone_form(s.eta, link) << ", residual " << status(s.residual) << "\n";
    return;
  }
  const auto phi = g2_cone_form(link);
  const auto psi = g2_cone_dual(link);
  out << format_report(torsion_check(link_su3_derivative_data(link)));
  out << "phi_C = " << format_cone_form(phi, link) << "\n";
  out << "psi_C = " << format_cone_form(psi, link) << "\n";
  out << "d phi_C = " << status(cone_d(phi, link)) << ", d psi_C = " << status(cone_d(psi, link)) << "\n";
  out << "*phi_C - psi_C = " << status(cone_hodge(phi, link) - psi) << "\n";
  const auto lhs = cone_codifferential(cone_wedge(radial_potential_differential(), phi, link), link);
  out << "d*(d(r^2/2) ^ phi_C) = " << format_cone_form(lhs, link) << "\n";
  const auto s = g2_cone_obstruction_solution(link);
  out << s.equation << ": " << unknown_of(s.equation) << " = " << format_cone_form(s.eta, link) << ", residual " << status(s.residual) << "\n";
}

// ------------------------------------------------------------------ radial

struct MetricOptions {
  std::string profile;
  int n = 7;
  std::optional<double> c;
  std::optional<double> nu;
  double r0 = 1.0;
  double r_max = 1e3;
  int nodes = 10000;

  void bind(CLI::App* app) {
    app->add_option("--profile", profile, "profile record");
    app->add_option("--n", n, "dimension");
    app->add_option("--c", c, "perturbation amplitude");
    app->add_option("--nu", nu, "rate");
    app->add_option("--r0", r0, "inner radius");
    app->add_option("--rmax", r_max, "outer radius");
    app->add_option("--nodes", nodes, "grid nodes");
  }

  std::pair<WarpedMetric, int> build(const CLI::App* app) const {
    if (!profile.empty()) {
      auto rec = parse_profile(read_text_file(profile));
      return {rec.metric, app->count("--nodes") ? nodes : rec.nodes};
    }
    if (c.has_value() != nu.has_value()) throw ValidationError("--c and --nu go together");
    if (!c) return {WarpedMetric::euclidean(n, r0, r_max), nodes};
    return {WarpedMetric::perturbed_cone(n, *c, *nu, r0, r_max), nodes};
  }
};

void run_rates(int n, const std::string& spectrum, const std::vector<double>& window, int k_max, std::ostream& out) {
  if (window.size() != 2) throw ValidationError("--window takes two numbers");
  std::vector<SpectrumEntry> entries;
  if (spectrum.rfind("sphere", 0) == 0 && spectrum.size() > 6 &&
      spectrum.find_first_not_of("0123456789", 6) == std::string::npos) {
    const int m = std::stoi(spectrum.substr(6));
    if (m != n - 1) throw DimensionMismatch("link S^" + std::to_string(m) + " does not bound a cone of dimension " + std::to_string(n));
    entries = sphere_spectrum(m, k_max);
  } else {
    entries = parse_spectrum(read_text_file(spectrum));
  }
  const auto set = critical_rates(entries, n, window[0], window[1]);
  out << format_rates(set);
  for (const auto& r : set.rates)
    out << "  lambda = " << num(r.lambda) << "  mu = " << num(r.mu) << "  multiplicity " << r.multiplicity << "\n";
}

RadialField load_field(const std::string& path) {
  RadialField f;
  for (const auto& line : record_lines(read_text_file(path))) {
    if (line.fields.size() < 2) throw ParseError(line.number, "expected '<r> <value>'");
    f.r.push_back(parse_double_field(line, 0));
    f.values.push_back(parse_double_field(line, 1));
  }
  f.validate();
  return f;
}

void run_norm(const MetricOptions& mo, const CLI::App* app, const std::string& field_path, std::optional<double> power,
              int l, double lambda, double p, std::ostream& out) {
  const auto [metric, nodes] = mo.build(app);
  if (field_path.empty() == !power.has_value()) throw ValidationError("give exactly one of --field and --power");
  const RadialField u = power ? sample_field(log_grid(metric.r0(), metric.r_max(), nodes),
                                             [a = *power](double r) { return std::pow(r, a); })
                              : load_field(field_path);
  out << "norm = " << num(weighted_norm(u, l, lambda, p, metric)) << "\n";
  if (power)
    out << "extrapolation R_max -> inf: " << (power_law_norm_finite(*power, lambda, p) ? "finite" : "divergent")
        << " (a " << (*power < lambda ? "<" : ">=") << " lambda)\n";
}

void run_potential(const MetricOptions& mo, const CLI::App* app, const std::string& inner, const std::string& out_path,
                   std::ostream& out) {
  const auto [metric, nodes] = mo.build(app);
  PotentialOptions opt;
  opt.nodes = nodes;
  if (inner == "dirichlet") opt.inner = PotentialOptions::Inner::Dirichlet;
  else if (inner != "neumann") throw ValidationError("--inner must be neumann or dirichlet");
  const auto s = solve_potential(metric, opt);
  out << "metric: " << metric.describe() << " on [" << num(metric.r0()) << ", " << num(metric.r_max()) << "]\n";
  out << format_solution(s);
  auto defect = laplacian_r2_defect(s.u.r, metric);
  for (auto& x : defect.values) x = std::abs(x);
  const auto defect_rate = fit_decay_exponent(defect);
  out << "decay exponent of |Delta r^2 + 2n| = " << (defect_rate ? num(*defect_rate) : "undetermined (exact)") << "\n";
  const auto t = tashiro_check(s.u, metric);
  out << "tashiro: " << (t.exact ? "PotentialExact" : "Deviation") << " (radial " << num(t.radial_deviation)
      << ", spherical " << num(t.spherical_deviation) << ")\n";
  if (!out_path.empty()) write_columns(out_path, s);
}

// ------------------------------------------------------------------ obstruct / catalog

void run_obstruct(const std::string& space, const std::string& record, const std::string& verify, std::ostream& out) {
  const int given = !space.empty() + !record.empty() + !verify.empty();
  if (given != 1) throw ValidationError("give exactly one of --space, --record and --verify");
  if (!space.empty()) {
    out << format_verdicts(lookup(space));
    return;
  }
  if (!record.empty()) {
    const auto recs = parse_catalog(read_text_file(record));
    for (std::size_t i = 0; i < recs.size(); ++i) out << (i ? "\n" : "") << format_verdicts(recs[i]);
    return;
  }
  if (verify == "flat") {
    const auto s = flat_g2_obstruction_solution();
    out << "eta = " << format_scalar(s.constant) << " *(d(|x|^2/2) ^ phi0)\n" << format_residual(s.residual);
  } else if (verify == "nk-cone") {
    const auto link = nk_link_preset();
    const auto s = g2_cone_obstruction_solution(link);
    out << "eta = " << format_cone_form(s.eta, link) << "\n"
        << format_residual(verify_obstruction_equation(s.equation, s.eta, s.rhs, link));
  } else if (verify == "cy-cone") {
    const auto link = cy_link_preset();
    for (const auto& s : cy_cone_obstruction_solutions(link))
      out << unknown_of(s.equation) << " = " << format_cone_form(s.eta, link) << "\n"
          << format_residual(verify_obstruction_equation(s.equation, s.eta, s.rhs, link));
  } else {
    throw ValidationError("--verify takes flat, nk-cone or cy-cone");
  }
}

void run_catalog(bool records, std::ostream& out) {
  if (records) {
    out << format_catalog(catalog());
    return;
  }
  char buf[160];
  for (const auto& rec : catalog()) {
    const Verdict v = rec.geometry == Geometry::G2 ? g2_verdict(rec) : su3_verdict(rec);
    std::snprintf(buf, sizeof buf, "%-18s %-10s rate %-5s %s (%s)\n", rec.name.c_str(), to_string(rec.geometry),
                  rec.euclidean ? "-" : num(rec.rate).c_str(), to_string(v.kind), v.provenance.c_str());
    out << buf;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Computations with G2 and SU(3) structures, cones and asymptotically conical spaces", "holonomy-lab"};
  app.require_subcommand(1);
  std::string precision_flag;
  app.add_option("--precision", precision_flag, "exact or f64 (default: $HOLONOMY_LAB_PRECISION, else exact)");

  std::string form, out_path, bundle, omega, re_omega, tensor, metric_path, link, preset = "nk";
  auto* stable = app.add_subcommand("stable", "classify a stable form and print its metric");
  stable->add_option("--form", form, "form record")->required();

  auto* dual = app.add_subcommand("dual", "Hitchin dual of a stable form");
  dual->add_option("--form", form, "form record")->required();
  dual->add_option("--out", out_path, "write the dual form record");

  auto* su3 = app.add_subcommand("su3", "assemble an SU(3) structure from omega and ReOmega");
  su3->add_option("--bundle", bundle, "bundle with [omega] and [ReOmega]");
  su3->add_option("--omega", omega, "2-form record");
  su3->add_option("--re-omega", re_omega, "3-form record");
  su3->add_option("--out", out_path, "write the completed bundle");

  bool ranks = false;
  auto* sym2 = app.add_subcommand("sym2", "action of symmetric 2-tensors on forms");
  sym2->add_option("--form", form, "form record");
  sym2->add_option("--tensor", tensor, "symmetric array record");
  sym2->add_option("--metric", metric_path, "metric record (default identity)");
  sym2->add_flag("--ranks", ranks, "injectivity ranks for the reference structures");

  auto* cone = app.add_subcommand("cone", "exact cone calculus over a link table");
  cone->add_option("--link", link, "link table");
  cone->add_option("--preset", preset, "nk or cy")->check(CLI::IsMember({"nk", "cy"}));

  int rates_n = 7, k_max = 32;
  std::string spectrum;
  std::vector<double> window;
  auto* rates = app.add_subcommand("rates", "critical rates of the cone Laplacian");
  rates->add_option("--n", rates_n, "cone dimension")->required();
  rates->add_option("--spectrum", spectrum, "sphereM or a spectrum record")->required();
  rates->add_option("--window", window, "closed window lo hi")->expected(2)->required()->allow_extra_args(false);
  rates->add_option("--kmax", k_max, "highest sphere harmonic degree");

  MetricOptions norm_metric, potential_metric;
  std::string field;
  std::optional<double> power;
  int l = 0;
  double lambda = 0.0, p = 2.0;
  auto* norm = app.add_subcommand("norm", "weighted Sobolev norm of a radial field");
  norm_metric.bind(norm);
  norm->add_option("--field", field, "two-column file r value");
  norm->add_option("--power", power, "use u = r^a");
  norm->add_option("--l", l, "derivative order");
  norm->add_option("--lambda", lambda, "weight");
  norm->add_option("--p", p, "exponent");

  std::string inner = "neumann";
  auto* potential = app.add_subcommand("potential", "approximate potential Delta u = -n on a warped cone");
  potential_metric.bind(potential);
  potential->add_option("--inner", inner, "neumann or dirichlet");
  potential->add_option("--out", out_path, "column file r v u");

  std::string space, record, verify;
  auto* obstruct = app.add_subcommand("obstruct", "verdicts and obstruction equations");
  obstruct->add_option("--space", space, "catalog name");
  obstruct->add_option("--record", record, "catalog-format record file");
  obstruct->add_option("--verify", verify, "flat, nk-cone or cy-cone");

  bool records = false;
  auto* cat = app.add_subcommand("catalog", "list catalogued AC spaces");
  cat->add_flag("--records", records, "print the full records");

  auto* selftest = app.add_subcommand("selftest", "exact identity suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Precision precision = resolve_precision(precision_flag);
    const bool exact = precision == Precision::Exact;
    if (stable->parsed()) {
      exact ? run_stable<Rational>(form, out) : run_stable<double>(form, out);
    } else if (dual->parsed()) {
      exact ? run_dual<Rational>(form, out_path, out) : run_dual<double>(form, out_path, out);
    } else if (su3->parsed()) {
      exact ? run_su3<Rational>(bundle, omega, re_omega, out_path, out)
            : run_su3<double>(bundle, omega, re_omega, out_path, out);
    } else if (sym2->parsed()) {
      if (ranks) run_sym2_ranks(out);
      else if (form.empty() || tensor.empty()) throw ValidationError("sym2 needs --form and --tensor, or --ranks");
      else exact ? run_sym2_action<Rational>(form, tensor, metric_path, out)
                 : run_sym2_action<double>(form, tensor, metric_path, out);
    } else if (cone->parsed()) {
      run_cone(link, preset, out);
    } else if (rates->parsed()) {
      run_rates(rates_n, spectrum, window, k_max, out);
    } else if (norm->parsed()) {
      run_norm(norm_metric, norm, field, power, l, lambda, p, out);
    } else if (potential->parsed()) {
      run_potential(potential_metric, potential, inner, out_path, out);
    } else if (obstruct->parsed()) {
      run_obstruct(space, record, verify, out);
    } else if (cat->parsed()) {
      run_catalog(records, out);
    } else if (selftest->parsed()) {
      const auto lines = run_selftest();
      out << format_selftest(lines);
      for (const auto& line : lines)
        if (!line.passed) return 1;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace holonomy
