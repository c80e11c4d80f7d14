#include "holonomy/cones.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace holonomy {

namespace {

int parity_sign(int exponent) { return (exponent % 2 == 0) ? 1 : -1; }

std::string trim_copy(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

// ------------------------------------------------------------------ elements

LinkElement& accumulate(LinkElement& into, const LinkElement& a, const Rational& scale) {
  if (scale == 0) return into;
  for (const auto& [g, c] : a) {
    auto [it, inserted] = into.try_emplace(g, c * scale);
    if (!inserted) {
      it->second += c * scale;
      if (it->second == 0) into.erase(it);
    }
  }
  return into;
}

LinkElement scaled(const LinkElement& a, const Rational& s) {
  LinkElement out;
  return accumulate(out, a, s);
}

bool is_zero(const LinkElement& a) { return a.empty(); }

// ------------------------------------------------------------------ complex

LinkComplex::LinkComplex(std::string name, int link_dim) : name_(std::move(name)), dim_(link_dim) {
  if (link_dim < 1 || link_dim >= kMaxDim) throw DimensionMismatch("link dimension out of range");
  gens_.push_back({"1", 0});
}

int LinkComplex::add_generator(const std::string& name, int degree) {
  if (!is_identifier(name)) throw ValidationError("invalid generator name '" + name + "'");
  if (has_generator(name)) throw ValidationError("duplicate generator '" + name + "'");
  if (degree < 0 || degree > dim_) throw DegreeOverflow("generator '" + name + "' has degree outside 0.." + std::to_string(dim_));
  gens_.push_back({name, degree});
  return static_cast<int>(gens_.size()) - 1;
}

int LinkComplex::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return static_cast<int>(i);
  throw UnknownGenerator("unknown generator '" + std::string(name) + "' in link " + name_);
}

bool LinkComplex::has_generator(std::string_view name) const {
  for (const auto& g : gens_)
    if (g.name == name) return true;
  return false;
}

void LinkComplex::set_d(int gen, LinkElement value) {
  if (gen == kUnit) throw ValidationError("d of the unit is fixed to 0");
  d_[gen] = std::move(value);
}

void LinkComplex::set_wedge(int a, int b, LinkElement value) {
  if (a == kUnit || b == kUnit) throw ValidationError("products with the unit are fixed");
  wedge_[{a, b}] = std::move(value);
}

void LinkComplex::set_star(int gen, LinkElement value) { star_[gen] = std::move(value); }

int LinkComplex::degree(const LinkElement& a) const {
  int deg = -1;
  for (const auto& [g, c] : a) {
    const int dg = degree_of(g);
    if (deg >= 0 && dg != deg) throw ValidationError("link element mixes degrees " + std::to_string(deg) + " and " + std::to_string(dg));
    deg = dg;
  }
  return deg;
}

LinkElement LinkComplex::d_generator(int gen) const {
  if (gen == kUnit) return {};
  if (const auto it = d_.find(gen); it != d_.end()) return it->second;
  if (degree_of(gen) == dim_) return {};
  throw MissingTableEntry("no d entry for '" + name_of(gen) + "'");
}

LinkElement LinkComplex::wedge_generators(int a, int b) const {
  if (a == kUnit) return {{b, Rational(1)}};
  if (b == kUnit) return {{a, Rational(1)}};
  const int da = degree_of(a), db = degree_of(b);
  if (da + db > dim_) return {};
  if (const auto it = wedge_.find({a, b}); it != wedge_.end()) return it->second;
  if (const auto it = wedge_.find({b, a}); it != wedge_.end()) return scaled(it->second, Rational(parity_sign(da * db)));
  if (a == b && da % 2 == 1) return {};
  throw MissingTableEntry("no wedge entry for '" + name_of(a) + " ^ " + name_of(b) + "'");
}

LinkElement LinkComplex::d(const LinkElement& a) const {
  LinkElement out;
  for (const auto& [g, c] : a) accumulate(out, d_generator(g), c);
  return out;
}

LinkElement LinkComplex::wedge(const LinkElement& a, const LinkElement& b) const {
  LinkElement out;
  for (const auto& [ga, ca] : a)
    for (const auto& [gb, cb] : b) accumulate(out, wedge_generators(ga, gb), ca * cb);
  return out;
}

LinkElement LinkComplex::star(const LinkElement& a) const {
  if (!has_star()) throw MissingTableEntry("link " + name_ + " has no star table");
  LinkElement out;
  for (const auto& [g, c] : a) {
    const auto it = star_.find(g);
    if (it == star_.end()) throw MissingTableEntry("no star entry for '" + name_of(g) + "'");
    accumulate(out, it->second, c);
  }
  return out;
}

LinkElement LinkComplex::element(std::string_view gen, const Rational& c) const {
  if (c == 0) return {};
  return {{index_of(gen), c}};
}

AuditReport LinkComplex::audit() const {
  AuditReport report;
  std::set<std::string> seen;
  auto fail = [&](const std::string& msg) {
    if (seen.insert(msg).second) report.failures.push_back(msg);
  };
  auto expect_degree = [&](const LinkElement& value, int expected, const std::string& what) {
    ++report.checks;
    for (const auto& [g, c] : value)
      if (degree_of(g) != expected) {
        fail(what + ": term '" + name_of(g) + "' has degree " + std::to_string(degree_of(g)) + ", expected " +
             std::to_string(expected));
        return;
      }
  };

  for (const auto& [g, v] : d_) expect_degree(v, degree_of(g) + 1, "d " + name_of(g));
  for (const auto& [ab, v] : wedge_)
    expect_degree(v, degree_of(ab.first) + degree_of(ab.second), name_of(ab.first) + " ^ " + name_of(ab.second));
  for (const auto& [g, v] : star_) expect_degree(v, dim_ - degree_of(g), "* " + name_of(g));
  if (!volume_.empty()) expect_degree(volume_, dim_, "volume");

  const int count = generator_count();
  auto guarded = [&](auto&& body) {
    try {
      body();
    } catch (const MissingTableEntry& e) {
      fail(e.what());
    } catch (const ValidationError& e) {
      fail(e.what());
    }
  };

  for (int g = 1; g < count; ++g)
    guarded([&] {
      ++report.checks;
      if (!d(d_generator(g)).empty()) fail("d^2 != 0 on " + name_of(g));
    });

  for (const auto& [ab, v] : wedge_) {
    const auto [a, b] = ab;
    const int sign = parity_sign(degree_of(a) * degree_of(b));
    ++report.checks;
    if (a == b && sign < 0 && !v.empty()) fail(name_of(a) + " ^ " + name_of(a) + " must vanish for odd degree");
    if (const auto it = wedge_.find({b, a}); it != wedge_.end() && a < b && it->second != scaled(v, Rational(sign)))
      fail("graded commutativity fails for " + name_of(a) + ", " + name_of(b));
  }

  for (int a = 1; a < count; ++a)
    for (int b = 1; b < count; ++b) {
      const LinkElement ea{{a, Rational(1)}}, eb{{b, Rational(1)}};
      for (int c = 1; c < count; ++c) {
        if (degree_of(a) + degree_of(b) + degree_of(c) > dim_) continue;
        const LinkElement ec{{c, Rational(1)}};
        guarded([&] {
          ++report.checks;
          if (wedge(wedge(ea, eb), ec) != wedge(ea, wedge(eb, ec)))
            fail("associativity fails for " + name_of(a) + ", " + name_of(b) + ", " + name_of(c));
        });
      }
      guarded([&] {
        ++report.checks;
        LinkElement rhs = wedge(d(ea), eb);
        accumulate(rhs, wedge(ea, d(eb)), Rational(parity_sign(degree_of(a))));
        if (d(wedge(ea, eb)) != rhs) fail("Leibniz rule fails for " + name_of(a) + ", " + name_of(b));
      });
    }

  if (has_star()) {
    for (int g = 0; g < count; ++g)
      guarded([&] {
        ++report.checks;
        const int k = degree_of(g);
        const LinkElement eg{{g, Rational(1)}};
        if (star(star(eg)) != scaled(eg, Rational(parity_sign(k * (dim_ - k)))))
          fail("double star sign fails on " + name_of(g));
      });
    guarded([&] {
      ++report.checks;
      if (!volume_.empty() && star(LinkElement{{kUnit, Rational(1)}}) != volume_) fail("*1 differs from the volume form");
    });
    // a ∧ *b = b ∧ *a for generators of equal degree (symmetry of the metric).
    for (int a = 0; a < count; ++a)
      for (int b = a + 1; b < count; ++b) {
        if (degree_of(a) != degree_of(b)) continue;
        guarded([&] {
          ++report.checks;
          const LinkElement ea{{a, Rational(1)}}, eb{{b, Rational(1)}};
          if (wedge(ea, star(eb)) != wedge(eb, star(ea)))
            fail("star table is not symmetric on " + name_of(a) + ", " + name_of(b));
        });
      }
  }
  return report;
}

// ------------------------------------------------------------------ text format

LinkElement parse_link_element(const LinkComplex& link, std::string_view text, int line) {
  LinkElement out;
  int sign = 1;
  std::optional<Rational> coefficient;
  auto flush_unit = [&] {
    if (coefficient) accumulate(out, {{LinkComplex::kUnit, Rational(1)}}, Rational(sign) * *coefficient);
    coefficient.reset();
    sign = 1;
  };
  std::string spaced;
  for (char c : text) {
    if (c == '*') spaced += ' ';
    else if (c == '+') spaced += " + ";
    else spaced += c;
  }
  for (std::string tok : split_ws(spaced)) {
    if (tok == "+") {
      flush_unit();
      continue;
    }
    if (tok == "-") {
      if (coefficient) flush_unit();
      sign = -sign;
      continue;
    }
    if (tok.front() == '-' && tok.size() > 1 && is_identifier(std::string_view(tok).substr(1))) {
      if (coefficient) throw ParseError(line, "coefficient followed by signed name '" + tok + "'");
      sign = -sign;
      tok.erase(0, 1);
    }
    if (is_identifier(tok)) {
      int gen = 0;
      try {
        gen = link.index_of(tok);
      } catch (const UnknownGenerator& e) {
        throw ParseError(line, e.what());
      }
      accumulate(out, {{gen, Rational(1)}}, Rational(sign) * coefficient.value_or(Rational(1)));
      coefficient.reset();
      sign = 1;
      continue;
    }
    if (coefficient) throw ParseError(line, "two coefficients in a row near '" + tok + "'");
    try {
      coefficient = parse_scalar<Rational>(tok);
    } catch (const ValidationError&) {
      throw ParseError(line, "cannot read '" + tok + "' as a coefficient or generator");
    }
  }
  flush_unit();
  return out;
}

std::string format_link_element(const LinkComplex& link, const LinkElement& a) {
  if (a.empty()) return "0";
  std::string out;
  for (const auto& [g, c] : a) {
    const bool negative = c < 0;
    const Rational magnitude = negative ? Rational(-c) : c;
    if (out.empty()) out += negative ? "-" : "";
    else out += negative ? " - " : " + ";
    if (g == LinkComplex::kUnit) out += magnitude.str();
    else if (magnitude == 1) out += link.name_of(g);
    else out += magnitude.str() + " " + link.name_of(g);
  }
  return out;
}

LinkComplex parse_link_complex(std::string_view text) {
  std::optional<LinkComplex> link;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim_copy(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    if (tokens[0] == "link") {
      if (link) throw ParseError(line_no, "second 'link' header");
      if (tokens.size() != 4 || tokens[2] != "dim") throw ParseError(line_no, "expected 'link <name> dim <m>'");
      int dim = 0;
      try {
        dim = std::stoi(tokens[3]);
        link.emplace(tokens[1], dim);
      } catch (const std::exception& e) {
        throw ParseError(line_no, std::string("bad link header: ") + e.what());
      }
      continue;
    }
    if (!link) throw ParseError(line_no, "table must start with a 'link' header");
    try {
      if (tokens[0] == "gen") {
        if (tokens.size() != 3) throw ParseError(line_no, "expected 'gen <name> <degree>'");
        link->add_generator(tokens[1], std::stoi(tokens[2]));
      } else if (tokens[0] == "volume") {
        link->set_volume(parse_link_element(*link, line.substr(6), line_no));
      } else {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected a relation with '='");
        const auto lhs = split_ws(line.substr(0, eq));
        const LinkElement rhs = parse_link_element(*link, line.substr(eq + 1), line_no);
        if (lhs.size() == 2 && lhs[0] == "d") link->set_d(link->index_of(lhs[1]), rhs);
        else if (lhs.size() == 2 && lhs[0] == "*") link->set_star(link->index_of(lhs[1]), rhs);
        else if (lhs.size() == 3 && lhs[1] == "^") link->set_wedge(link->index_of(lhs[0]), link->index_of(lhs[2]), rhs);
        else throw ParseError(line_no, "unrecognized relation '" + line + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!link) throw ParseError(line_no, "empty link table");
  return *link;
}

LinkComplex load_link_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open link table '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_link_complex(buffer.str());
}

std::string format_link_complex(const LinkComplex& link) {
  std::string out = "link " + link.name() + " dim " + std::to_string(link.link_dim()) + "\n";
  for (int g = 1; g < link.generator_count(); ++g)
    out += "gen " + link.name_of(g) + " " + std::to_string(link.degree_of(g)) + "\n";
  if (!link.volume().empty()) out += "volume " + format_link_element(link, link.volume()) + "\n";
  for (const auto& [g, v] : link.d_table()) out += "d " + link.name_of(g) + " = " + format_link_element(link, v) + "\n";
  for (const auto& [ab, v] : link.wedge_table())
    out += link.name_of(ab.first) + " ^ " + link.name_of(ab.second) + " = " + format_link_element(link, v) + "\n";
  for (const auto& [g, v] : link.star_table()) out += "* " + link.name_of(g) + " = " + format_link_element(link, v) + "\n";
  return out;
}

// ------------------------------------------------------------------ presets

const char* nk_link_text() {
  return R"(# Nearly Kaehler 6-dimensional link, lambda = 1.
link nearly_kahler dim 6
gen omega 2
gen ReOmega 3
gen ImOmega 3
gen omega2 4
gen omega3 6
volume 1/6 omega3
d omega = -3 ReOmega
d ReOmega = 0
d ImOmega = 2 omega2
d omega2 = 0
omega ^ omega = omega2
omega ^ omega2 = omega3
omega ^ ReOmega = 0
omega ^ ImOmega = 0
ReOmega ^ ImOmega = 2/3 omega3
* 1 = 1/6 omega3
* omega = 1/2 omega2
* ReOmega = ImOmega
* ImOmega = -ReOmega
* omega2 = 2 omega
* omega3 = 6
)";
}

const char* cy_link_text() {
  return R"(# Sasaki-Einstein 5-dimensional link of a Calabi-Yau cone.
# theta is the contact form, (omegaT, ReOmegaT, ImOmegaT) the transverse SU(2) triple.
link sasaki_einstein dim 5
gen theta 1
gen omegaT 2
gen ReOmegaT 2
gen ImOmegaT 2
gen theta_omegaT 3
gen theta_ReOmegaT 3
gen theta_ImOmegaT 3
gen omegaT2 4
gen theta_omegaT2 5
volume 1/2 theta_omegaT2
d theta = 2 omegaT
d omegaT = 0
d ReOmegaT = -3 theta_ImOmegaT
d ImOmegaT = 3 theta_ReOmegaT
d theta_omegaT = 2 omegaT2
d theta_ReOmegaT = 0
d theta_ImOmegaT = 0
d omegaT2 = 0
theta ^ omegaT = theta_omegaT
theta ^ ReOmegaT = theta_ReOmegaT
theta ^ ImOmegaT = theta_ImOmegaT
theta ^ omegaT2 = theta_omegaT2
theta ^ theta_omegaT = 0
theta ^ theta_ReOmegaT = 0
theta ^ theta_ImOmegaT = 0
omegaT ^ omegaT = omegaT2
ReOmegaT ^ ReOmegaT = omegaT2
ImOmegaT ^ ImOmegaT = omegaT2
omegaT ^ ReOmegaT = 0
omegaT ^ ImOmegaT = 0
ReOmegaT ^ ImOmegaT = 0
omegaT ^ theta_omegaT = theta_omegaT2
omegaT ^ theta_ReOmegaT = 0
omegaT ^ theta_ImOmegaT = 0
ReOmegaT ^ theta_omegaT = 0
ReOmegaT ^ theta_ReOmegaT = theta_omegaT2
ReOmegaT ^ theta_ImOmegaT = 0
ImOmegaT ^ theta_omegaT = 0
ImOmegaT ^ theta_ReOmegaT = 0
ImOmegaT ^ theta_ImOmegaT = theta_omegaT2
* 1 = 1/2 theta_omegaT2
* theta = 1/2 omegaT2
* omegaT = theta_omegaT
* ReOmegaT = theta_ReOmegaT
* ImOmegaT = theta_ImOmegaT
* theta_omegaT = omegaT
* theta_ReOmegaT = ReOmegaT
* theta_ImOmegaT = ImOmegaT
* omegaT2 = 2 theta
* theta_omegaT2 = 2
)";
}

LinkComplex nk_link_preset() { return parse_link_complex(nk_link_text()); }
LinkComplex cy_link_preset() { return parse_link_complex(cy_link_text()); }

std::map<std::string, KFormQ> nk_pointwise_model() {
  const KFormQ omega = reference_omega<Rational>();
  const KFormQ omega2 = wedge(omega, omega);
  return {{"1", KFormQ::constant(6, Rational(1))},
          {"omega", omega},
          {"ReOmega", reference_re_omega<Rational>()},
          {"ImOmega", reference_im_omega<Rational>()},
          {"omega2", omega2},
          {"omega3", wedge(omega2, omega)}};
}

std::map<std::string, KFormQ> cy_pointwise_model() {
  const KFormQ theta = KFormQ::basis(5, {5});
  const KFormQ omega = KFormQ::basis(5, {1, 2}) + KFormQ::basis(5, {3, 4});
  const KFormQ re = KFormQ::basis(5, {1, 3}) - KFormQ::basis(5, {2, 4});
  const KFormQ im = KFormQ::basis(5, {1, 4}) + KFormQ::basis(5, {2, 3});
  const KFormQ omega2 = wedge(omega, omega);
  return {{"1", KFormQ::constant(5, Rational(1))},
          {"theta", theta},
          {"omegaT", omega},
          {"ReOmegaT", re},
          {"ImOmegaT", im},
          {"theta_omegaT", wedge(theta, omega)},
          {"theta_ReOmegaT", wedge(theta, re)},
          {"theta_ImOmegaT", wedge(theta, im)},
          {"omegaT2", omega2},
          {"theta_omegaT2", wedge(theta, omega2)}};
}

AuditReport pointwise_model_audit(const LinkComplex& link, const std::map<std::string, KFormQ>& model) {
  AuditReport report;
  const int m = link.link_dim();
  const auto g = Metric<Rational>::identity(m);
  auto realize = [&](const LinkElement& a, int degree) {
    KFormQ out(m, degree);
    for (const auto& [gen, c] : a) {
      const auto it = model.find(link.name_of(gen));
      if (it == model.end()) throw UnknownGenerator("model has no form for '" + link.name_of(gen) + "'");
      out += c * it->second;
    }
    return out;
  };
  const int count = link.generator_count();
  for (int a = 0; a < count; ++a) {
    const LinkElement ea{{a, Rational(1)}};
    const int da = link.degree_of(a);
    const KFormQ fa = realize(ea, da);
    for (int b = 0; b < count; ++b) {
      const int db = link.degree_of(b);
      if (da + db > m) continue;
      ++report.checks;
      try {
        const LinkElement eb{{b, Rational(1)}};
        if (realize(link.wedge(ea, eb), da + db) != wedge(fa, realize(eb, db)))
          report.failures.push_back("wedge " + link.name_of(a) + " ^ " + link.name_of(b) + " disagrees with the model");
      } catch (const ValidationError& e) {
        report.failures.push_back(e.what());
      }
    }
    if (link.has_star()) {
      ++report.checks;
      try {
        if (realize(link.star(ea), m - da) != hodge_star(fa, g))
          report.failures.push_back("star of " + link.name_of(a) + " disagrees with the model");
      } catch (const ValidationError& e) {
        report.failures.push_back(e.what());
      }
    }
  }
  if (!link.volume().empty()) {
    ++report.checks;
    if (realize(link.volume(), m) != KFormQ::volume(m)) report.failures.push_back("volume disagrees with the model");
  }
  return report;
}

SU3DerivativeData link_su3_derivative_data(const LinkComplex& link) {
  auto labeled = [&](const LinkElement& a) {
    LabeledVector out;
    for (const auto& [g, c] : a) out[link.name_of(g)] = to_double(c);
    return out;
  };
  const LinkElement omega = link.element("omega");
  const LinkElement re = link.element("ReOmega");
  const LinkElement im = link.element("ImOmega");
  SU3DerivativeData data;
  data.d_omega = labeled(link.d(omega));
  data.d_re_omega = labeled(link.d(re));
  data.d_im_omega = labeled(link.d(im));
  data.re_omega = labeled(re);
  data.omega_sq = labeled(link.wedge(omega, omega));
  return data;
}

// ------------------------------------------------------------------ cone forms

ConeForm ConeForm::pure(const Rational& p, const LinkElement& beta) {
  ConeForm out;
  for (const auto& [g, c] : beta) out.add(p, false, g, c);
  return out;
}

ConeForm ConeForm::dr_wedge(const Rational& p, const LinkElement& alpha) {
  ConeForm out;
  for (const auto& [g, c] : alpha) out.add(p, true, g, c);
  return out;
}

void ConeForm::add(const Rational& p, bool radial, int gen, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(Key{p, radial, gen}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ConeForm& ConeForm::operator+=(const ConeForm& o) {
  for (const auto& [k, c] : o.terms_) add(std::get<0>(k), std::get<1>(k), std::get<2>(k), c);
  return *this;
}

ConeForm& ConeForm::operator-=(const ConeForm& o) {
  for (const auto& [k, c] : o.terms_) add(std::get<0>(k), std::get<1>(k), std::get<2>(k), -c);
  return *this;
}

ConeForm& ConeForm::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

int cone_degree(const ConeForm& a, const LinkComplex& link) {
  int deg = -1;
  for (const auto& [k, c] : a.terms()) {
    const int d = link.degree_of(std::get<2>(k)) + (std::get<1>(k) ? 1 : 0);
    if (deg >= 0 && d != deg) throw ValidationError("cone form mixes degrees");
    deg = d;
  }
  return deg;
}

void validate(const ConeForm& a, const LinkComplex& link) {
  for (const auto& [k, c] : a.terms())
    if (std::get<2>(k) < 0 || std::get<2>(k) >= link.generator_count())
      throw UnknownGenerator("cone form references a generator outside link " + link.name());
  cone_degree(a, link);
}

ConeForm cone_d(const ConeForm& a, const LinkComplex& link) {
  validate(a, link);
  ConeForm out;
  for (const auto& [k, c] : a.terms()) {
    const auto& [p, radial, g] = k;
    const LinkElement dg = link.d({{g, Rational(1)}});
    if (radial) {
      // d(r^p dr∧α) = −r^p dr∧dα
      for (const auto& [h, e] : dg) out.add(p, true, h, -c * e);
    } else {
      // d(r^p β) = p r^{p−1} dr∧β + r^p dβ
      if (p != 0) out.add(p - 1, true, g, c * p);
      for (const auto& [h, e] : dg) out.add(p, false, h, c * e);
    }
  }
  return out;
}

ConeForm cone_wedge(const ConeForm& a, const ConeForm& b, const LinkComplex& link) {
  validate(a, link);
  validate(b, link);
  ConeForm out;
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      const auto& [pa, ra, ga] = ka;
      const auto& [pb, rb, gb] = kb;
      if (ra && rb) continue;
      // Moving dr from the right factor past β costs (−1)^{deg β}.
      const Rational sign = (rb && link.degree_of(ga) % 2) ? Rational(-1) : Rational(1);
      const LinkElement prod = link.wedge({{ga, Rational(1)}}, {{gb, Rational(1)}});
      for (const auto& [h, e] : prod) out.add(pa + pb, ra || rb, h, sign * ca * cb * e);
    }
  return out;
}

ConeForm cone_hodge(const ConeForm& a, const LinkComplex& link) {
  validate(a, link);
  const int n = link.link_dim() + 1;
  ConeForm out;
  for (const auto& [key, c] : a.terms()) {
    const auto& [p, radial, g] = key;
    const int k = link.degree_of(g);  // link degree of the generator
    const LinkElement sg = link.star({{g, Rational(1)}});
    const Rational power = p + n - 1 - 2 * k;
    if (radial) {
      // *(r^p dr∧α) = r^{p+n−1−2k} *_L α
      for (const auto& [h, e] : sg) out.add(power, false, h, c * e);
    } else {
      // *(r^p β) = (−1)^k r^{p+n−1−2k} dr∧*_L β
      for (const auto& [h, e] : sg) out.add(power, true, h, Rational(parity_sign(k)) * c * e);
    }
  }
  return out;
}

ConeForm cone_codifferential(const ConeForm& a, const LinkComplex& link) {
  const int k = cone_degree(a, link);
  if (k <= 0) return {};
  const int n = link.link_dim() + 1;
  return Rational(parity_sign(n * (k + 1) + 1)) * cone_hodge(cone_d(cone_hodge(a, link), link), link);
}

ConeForm radial_contract(const ConeForm& a) {
  ConeForm out;
  for (const auto& [key, c] : a.terms()) {
    const auto& [p, radial, g] = key;
    if (radial) out.add(p + 1, false, g, c);
  }
  return out;
}

ConeForm lie_radial(const ConeForm& a, const LinkComplex& link) {
  return radial_contract(cone_d(a, link)) + cone_d(radial_contract(a), link);
}

Homogeneity homogeneity_rate(const ConeForm& a, const LinkComplex& link) {
  Homogeneity out;
  if (a.is_zero()) return out;
  const int k = cone_degree(a, link);
  bool first = true;
  for (const auto& [key, c] : a.terms()) {
    const auto& [p, radial, g] = key;
    // Pure terms scale like r^p, dr terms like r^{p+1}; the rate subtracts k.
    const Rational rate = p + (radial ? 1 : 0) - k;
    if (first) {
      out.rate = rate;
      first = false;
    } else if (rate != out.rate) {
      out.kind = Homogeneity::Kind::Mixed;
      return out;
    }
  }
  out.kind = Homogeneity::Kind::Homogeneous;
  return out;
}

ConeForm dilate(const ConeForm& a, const Rational& t) {
  if (t <= 0) throw ValidationError("dilation factor must be positive");
  ConeForm out;
  for (const auto& [key, c] : a.terms()) {
    const auto& [p, radial, g] = key;
    const Rational e = p + (radial ? 1 : 0);
    // t^{a/b} = (t^a)^{1/b}, exact only for perfect powers.
    const BigInt num = boost::multiprecision::numerator(e);
    const BigInt den = boost::multiprecision::denominator(e);
    const long a_exp = num.convert_to<long>();
    Rational power(1);
    for (long i = 0; i < std::labs(a_exp); ++i) power *= t;
    if (a_exp < 0) power = Rational(1) / power;
    if (den != 1) power = real_root(power, den.convert_to<int>());
    out.add(p, radial, g, c * power);
  }
  return out;
}

std::map<std::string, double> labeled_coefficients(const ConeForm& a, const LinkComplex& link) {
  std::map<std::string, double> out;
  for (const auto& [key, c] : a.terms()) {
    const auto& [p, radial, g] = key;
    out["r^" + p.str() + (radial ? " dr " : " ") + link.name_of(g)] = to_double(c);
  }
  return out;
}

std::string format_cone_form(const ConeForm& a, const LinkComplex& link) {
  if (a.is_zero()) return "0";
  std::string out;
  for (const auto& [key, c] : a.terms()) {
    const auto& [p, radial, g] = key;
    const bool negative = c < 0;
    const Rational magnitude = negative ? Rational(-c) : c;
    if (out.empty()) out += negative ? "-" : "";
    else out += negative ? " - " : " + ";
    if (magnitude != 1) out += magnitude.str() + " ";
    std::string factors;
    if (p == 1) factors = "r";
    else if (p != 0) factors = "r^" + p.str();
    if (radial) factors += factors.empty() ? "dr" : " dr";
    if (g != LinkComplex::kUnit) factors += (factors.empty() ? "" : radial ? "^" : " ") + link.name_of(g);
    if (factors.empty()) factors = "1";
    out += factors;
  }
  return out;
}

// ------------------------------------------------------------------ G2 and CY cones

namespace {

void require_audited(const LinkComplex& link) {
  const auto report = link.audit();
  if (!report.ok()) throw ValidationError("link " + link.name() + " fails its audit: " + report.failures.front());
}

}  // namespace

ConeForm g2_cone_form(const LinkComplex& link) {
  require_audited(link);
  return ConeForm::pure(3, link.element("ReOmega")) - ConeForm::dr_wedge(2, link.element("omega"));
}

ConeForm g2_cone_dual(const LinkComplex& link) {
  require_audited(link);
  const LinkElement omega = link.element("omega");
  return -ConeForm::dr_wedge(3, link.element("ImOmega")) -
         Rational(1, 2) * ConeForm::pure(4, link.wedge(omega, omega));
}

CYConeForms cy_cone_forms(const LinkComplex& link) {
  require_audited(link);
  const LinkElement theta = link.element("theta");
  const LinkElement re = link.element("ReOmegaT");
  const LinkElement im = link.element("ImOmegaT");
  CYConeForms out;
  out.omega = ConeForm::dr_wedge(1, theta) + ConeForm::pure(2, link.element("omegaT"));
  out.re_omega = ConeForm::dr_wedge(2, re) - ConeForm::pure(3, link.wedge(theta, im));
  out.im_omega = ConeForm::dr_wedge(2, im) + ConeForm::pure(3, link.wedge(theta, re));
  return out;
}

ConeForm radial_potential_differential() { return ConeForm::dr_wedge(1, {{LinkComplex::kUnit, Rational(1)}}); }

ObstructionSolution solve_by_projection(const std::string& equation, const ConeForm& candidate, const ConeForm& rhs,
                                        const LinkComplex& link) {
  const ConeForm d_candidate = cone_d(candidate, link);
  Rational dot(0), norm2(0);
  for (const auto& [key, c] : d_candidate.terms()) {
    norm2 += c * c;
    const auto it = rhs.terms().find(key);
    if (it != rhs.terms().end()) dot += c * it->second;
  }
  ObstructionSolution out;
  out.equation = equation;
  out.candidate = candidate;
  out.constant = norm2 == 0 ? Rational(0) : dot / norm2;
  out.eta = out.constant * candidate;
  out.rhs = rhs;
  out.residual = cone_d(out.eta, link) - rhs;
  return out;
}

ObstructionSolution g2_cone_obstruction_solution(const LinkComplex& nk_link) {
  const ConeForm phi = g2_cone_form(nk_link);
  const ConeForm psi = g2_cone_dual(nk_link);
  const ConeForm candidate = cone_hodge(cone_wedge(radial_potential_differential(), phi, nk_link), nk_link);
  return solve_by_projection("d eta = 4 Theta(phi_C)", candidate, Rational(4) * psi, nk_link);
}

std::vector<ObstructionSolution> cy_cone_obstruction_solutions(const LinkComplex& cy_link) {
  const CYConeForms cy = cy_cone_forms(cy_link);
  const ConeForm du = radial_potential_differential();
  const ConeForm nu_candidate = cone_hodge(cone_wedge(du, cy.im_omega, cy_link), cy_link);
  const ConeForm eta_candidate = cone_hodge(cone_wedge(du, cy.omega, cy_link), cy_link);
  return {solve_by_projection("d nu = -3 ReOmega_C", nu_candidate, Rational(-3) * cy.re_omega, cy_link),
          solve_by_projection("d eta = 2 omega_C^2", eta_candidate,
                              Rational(2) * cone_wedge(cy.omega, cy.omega, cy_link), cy_link)};
}

}  // namespace holonomy
