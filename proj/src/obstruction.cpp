#include "holonomy/obstruction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "holonomy/io.hpp"

namespace holonomy {

namespace {

std::string fmt_rate(double r) {
  if (std::isinf(r)) return r < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

const char* display_name(const std::string& form) {
  if (form == "star_phi") return "*phi";
  if (form == "omega") return "omega";
  if (form == "omega2") return "omega^2";
  if (form == "re_omega") return "ReOmega";
  if (form == "im_omega") return "ImOmega";
  return "?";
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::string header(const ACSpaceRecord& rec) {
  return rec.name + " (" + to_string(rec.geometry) + ", dim " + std::to_string(rec.dimension) + ", rate " +
         fmt_rate(rec.rate) + ")";
}

}  // namespace

const char* to_string(Geometry g) { return g == Geometry::G2 ? "G2" : "CalabiYau6"; }

const char* to_string(ClassFlag f) {
  switch (f) {
    case ClassFlag::Unknown: return "unknown";
    case ClassFlag::Zero: return "zero";
    case ClassFlag::Nonzero: return "nonzero";
  }
  return "?";
}

const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::ForcedEuclidean: return "ForcedEuclidean";
    case Verdict::Kind::ObstructedNoDesingularization: return "ObstructedNoDesingularization";
    case Verdict::Kind::TheoremInapplicable: return "TheoremInapplicable";
    case Verdict::Kind::ConclusionExactnessRequired: return "ConclusionExactnessRequired";
  }
  return "?";
}

int class_degree(const std::string& form) {
  if (form == "omega") return 2;
  if (form == "re_omega" || form == "im_omega") return 3;
  if (form == "star_phi" || form == "omega2") return 4;
  throw ValidationError("unknown class '" + form + "'");
}

int ACSpaceRecord::betti_number(int k) const {
  const auto it = betti.find(k);
  return it == betti.end() ? 0 : it->second;
}

ClassFlag ACSpaceRecord::class_of(const std::string& form) const {
  const int k = class_degree(form);
  if (betti_number(k) == 0) return ClassFlag::Zero;
  const auto it = classes.find(form);
  return it == classes.end() ? ClassFlag::Unknown : it->second;
}

void ACSpaceRecord::validate() const {
  if (name.empty()) throw ValidationError("record without a name");
  if (!(rate < 0.0)) throw RateOutOfRange(name + ": rate must be negative, got " + fmt_rate(rate));
  const int expected = geometry == Geometry::G2 ? 7 : 6;
  if (dimension != expected)
    throw DimensionMismatch(name + ": " + to_string(geometry) + " records have dimension " + std::to_string(expected));
  for (const auto& [k, b] : betti)
    if (k < 0 || k > dimension || b < 0) throw ValidationError(name + ": bad Betti number entry");
  for (const auto& [form, flag] : classes) {
    const bool g2_form = form == "star_phi";
    if (g2_form != (geometry == Geometry::G2)) throw ValidationError(name + ": class '" + form + "' does not fit geometry");
    if (flag == ClassFlag::Nonzero && betti_number(class_degree(form)) == 0)
      throw ValidationError(name + ": class '" + form + "' declared nonzero but b" +
                            std::to_string(class_degree(form)) + " = 0");
  }
}

// ------------------------------------------------------------------ verdicts

Verdict g2_verdict(const ACSpaceRecord& rec) {
  if (rec.geometry != Geometry::G2) throw ValidationError(rec.name + ": g2_verdict needs a G2 record");
  rec.validate();
  Verdict v;
  const ClassFlag star = rec.class_of("star_phi");
  if (rec.euclidean) {
    v.kind = Verdict::Kind::ForcedEuclidean;
    v.provenance = "Theorem C";
    v.forms = {"*phi"};
    v.notes.push_back("*phi is exact on flat R^7 (Poincare lemma)");
    return v;
  }
  if (rec.rate < kG2RateThreshold) {
    v.kind = Verdict::Kind::ObstructedNoDesingularization;
    v.provenance = "Theorem A/C";
    v.forms = {"*phi"};
    v.notes.push_back("rate " + fmt_rate(rec.rate) + " < -7/2 and not Euclidean: *phi is not exact (Theorem C)");
    v.notes.push_back("a smooth desingularization would force *phi exact (Theorem A)");
    if (star == ClassFlag::Zero) v.notes.push_back("warning: catalog data say [*phi] = 0, contradicting Theorem C");
    return v;
  }
  if (star == ClassFlag::Nonzero) {
    v.kind = Verdict::Kind::ObstructedNoDesingularization;
    v.provenance = "Theorem A";
    v.forms = {"*phi"};
    v.notes.push_back("[*phi] is nonzero in H^4 by catalog data");
    return v;
  }
  v.kind = Verdict::Kind::TheoremInapplicable;
  v.provenance = "Theorem C";
  v.reason = "rate " + fmt_rate(rec.rate) + " >= -7/2";
  v.notes.push_back(star == ClassFlag::Zero ? "*phi is exact since H^4 = 0, so Theorem A gives no obstruction"
                                            : "a desingularization would still require *phi exact (Theorem A)");
  return v;
}

Verdict su3_verdict(const ACSpaceRecord& rec, SU3Reading reading) {
  if (rec.geometry != Geometry::CalabiYau6) throw ValidationError(rec.name + ": su3_verdict needs a CalabiYau6 record");
  rec.validate();
  Verdict v;
  const std::string partner = reading == SU3Reading::Stated ? "re_omega" : "im_omega";
  if (rec.euclidean) {
    v.kind = Verdict::Kind::ForcedEuclidean;
    v.provenance = "Theorem D";
    v.forms = {"omega^2", "ReOmega"};
    v.notes.push_back("omega^2 and ReOmega are exact on flat R^6 (Poincare lemma)");
    return v;
  }
  // Theorem B needs both of these exact.
  std::vector<std::string> blocking;
  for (const char* f : {"omega2", "re_omega"})
    if (rec.class_of(f) == ClassFlag::Nonzero) blocking.push_back(display_name(f));

  if (rec.rate < kSU3RateThreshold) {
    // Theorem D: omega^2 and the partner form are not both exact.
    std::vector<std::string> candidates;
    for (const std::string& f : {std::string("omega2"), partner})
      if (rec.class_of(f) != ClassFlag::Zero) candidates.push_back(f);
    const std::string pair = std::string("(omega^2, ") + display_name(partner) + ")";
    v.notes.push_back("rate " + fmt_rate(rec.rate) + " < -3 and not Euclidean: " + pair +
                      " are not simultaneously exact (Theorem D)");
    if (candidates.empty()) v.notes.push_back("warning: catalog data make " + pair + " exact, contradicting Theorem D");
    const bool decides = partner == "re_omega" || (candidates.size() == 1 && candidates[0] == "omega2");
    if (decides) {
      v.kind = Verdict::Kind::ObstructedNoDesingularization;
      v.provenance = "Theorem B/D";
      for (const auto& f : candidates) v.forms.push_back(display_name(f));
      v.notes.push_back("a smooth desingularization would force omega^2 and ReOmega exact (Theorem B)");
      return v;
    }
    if (!blocking.empty()) {
      v.kind = Verdict::Kind::ObstructedNoDesingularization;
      v.provenance = "Theorem B";
      v.forms = blocking;
      return v;
    }
    v.kind = Verdict::Kind::ConclusionExactnessRequired;
    v.provenance = "Theorem B";
    v.forms = {"omega^2", "ReOmega"};
    v.notes.push_back("non-exactness of ImOmega alone does not contradict Theorem B");
    return v;
  }
  if (!blocking.empty()) {
    v.kind = Verdict::Kind::ObstructedNoDesingularization;
    v.provenance = "Theorem B";
    v.forms = blocking;
    v.notes.push_back("nonzero classes by catalog data");
    return v;
  }
  v.kind = Verdict::Kind::TheoremInapplicable;
  v.provenance = "Theorem D";
  v.reason = "rate " + fmt_rate(rec.rate) + " not < -3";
  if (rec.class_of("omega2") == ClassFlag::Zero && rec.class_of("re_omega") == ClassFlag::Zero)
    v.notes.push_back("omega^2 and ReOmega are exact by topology, so Theorem B gives no obstruction");
  else
    v.notes.push_back("a desingularization would still require omega^2 and ReOmega exact (Theorem B)");
  return v;
}

std::string format_verdict(const Verdict& v) {
  std::string out = std::string(to_string(v.kind)) + " (" + v.provenance + ")\n";
  if (!v.reason.empty()) out += "  reason: " + v.reason + "\n";
  if (!v.forms.empty()) {
    const char* label = v.kind == Verdict::Kind::ObstructedNoDesingularization ? "  blocking: " : "  forms: ";
    out += label + join(v.forms, ", ") + "\n";
  }
  for (const auto& n : v.notes) out += "  note: " + n + "\n";
  return out;
}

std::string format_verdicts(const ACSpaceRecord& rec) {
  if (rec.geometry == Geometry::G2) return format_verdict(g2_verdict(rec)) + "space: " + header(rec) + "\n";
  std::string out = format_verdict(su3_verdict(rec, SU3Reading::Stated));
  out += "space: " + header(rec) + "\n";
  out += "reading: Theorem D as stated pairs omega^2 with ReOmega (above)\n";
  out += "reading: Theorem D as proved pairs omega^2 with ImOmega:\n";
  out += "  " + format_verdict(su3_verdict(rec, SU3Reading::Proof));
  return out;
}

// ------------------------------------------------------------------ catalog

std::vector<ACSpaceRecord> parse_catalog(std::string_view text) {
  std::vector<ACSpaceRecord> out;
  std::vector<std::pair<std::string, int>> seen;
  for (const auto& line : record_lines(text)) {
    const auto& key = line.fields[0];
    if (key.front() == '[') {
      std::string joined;
      for (const auto& f : line.fields) joined += (joined.empty() ? "" : " ") + f;
      if (joined.back() != ']' || joined.size() < 3) throw ParseError(line.number, "bad section header");
      ACSpaceRecord rec;
      rec.name = joined.substr(1, joined.size() - 2);
      rec.rate = std::numeric_limits<double>::quiet_NaN();
      out.push_back(rec);
      continue;
    }
    if (out.empty()) throw ParseError(line.number, "record field outside a [section]");
    auto& rec = out.back();
    auto single = [&] {
      if (line.fields.size() != 2) throw ParseError(line.number, "expected '" + key + " <value>'");
      return line.fields[1];
    };
    if (key == "geometry") {
      const auto g = single();
      if (g == "G2") rec.geometry = Geometry::G2;
      else if (g == "CalabiYau6") rec.geometry = Geometry::CalabiYau6;
      else throw ParseError(line.number, "unknown geometry '" + g + "'");
    } else if (key == "dimension") {
      single();
      rec.dimension = parse_int_field(line, 1);
    } else if (key == "rate") {
      const auto r = single();
      rec.rate = r == "-inf" ? -std::numeric_limits<double>::infinity() : parse_double_field(line, 1);
    } else if (key == "link") {
      rec.link = single();
    } else if (key == "betti") {
      for (std::size_t i = 1; i < line.fields.size(); ++i) {
        const auto& f = line.fields[i];
        const auto colon = f.find(':');
        if (colon == std::string::npos) throw ParseError(line.number, "expected '<degree>:<betti>', got '" + f + "'");
        try {
          rec.betti[std::stoi(f.substr(0, colon))] = std::stoi(f.substr(colon + 1));
        } catch (const std::exception&) {
          throw ParseError(line.number, "bad Betti entry '" + f + "'");
        }
      }
    } else if (key == "class") {
      if (line.fields.size() != 3) throw ParseError(line.number, "expected 'class <form> zero|nonzero|unknown'");
      const auto& form = line.fields[1];
      try {
        class_degree(form);
      } catch (const ValidationError&) {
        throw ParseError(line.number, "unknown class '" + form + "'");
      }
      const auto& flag = line.fields[2];
      if (flag == "zero") rec.classes[form] = ClassFlag::Zero;
      else if (flag == "nonzero") rec.classes[form] = ClassFlag::Nonzero;
      else if (flag == "unknown") rec.classes[form] = ClassFlag::Unknown;
      else throw ParseError(line.number, "unknown class flag '" + flag + "'");
    } else if (key == "euclidean") {
      const auto e = single();
      if (e != "true" && e != "false") throw ParseError(line.number, "expected true or false");
      rec.euclidean = e == "true";
    } else {
      throw ParseError(line.number, "unknown field '" + key + "'");
    }
  }
  for (const auto& rec : out) {
    if (std::isnan(rec.rate)) throw ValidationError(rec.name + ": record needs a rate");
    rec.validate();
  }
  return out;
}

std::string format_catalog(const std::vector<ACSpaceRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    if (!out.empty()) out += "\n";
    out += "[" + rec.name + "]\n";
    out += std::string("geometry ") + to_string(rec.geometry) + "\n";
    out += "dimension " + std::to_string(rec.dimension) + "\n";
    out += "rate " + fmt_rate(rec.rate) + "\n";
    if (!rec.link.empty()) out += "link " + rec.link + "\n";
    out += "betti";
    for (const auto& [k, b] : rec.betti) out += " " + std::to_string(k) + ":" + std::to_string(b);
    out += "\n";
    for (const auto& [form, flag] : rec.classes) out += "class " + form + " " + to_string(flag) + "\n";
    out += std::string("euclidean ") + (rec.euclidean ? "true" : "false") + "\n";
  }
  return out;
}

const char* catalog_text() {
  return R"(# Asymptotically conical G2 and Calabi-Yau 3-folds.
# Betti numbers not listed are zero. Classes not listed are unknown unless
# the Betti number of their degree vanishes.

[Lambda2- S4]
geometry G2
dimension 7
rate -4
link CP3
betti 0:1 4:1
euclidean false

[Lambda2- CP2]
geometry G2
dimension 7
rate -4
link SU3/T2
betti 0:1 2:1 4:1
euclidean false

[S3 x R4]
geometry G2
dimension 7
rate -3
link S3xS3
betti 0:1 3:1
euclidean false

[Euclidean R7]
geometry G2
dimension 7
rate -inf
link S6
betti 0:1
euclidean true

[Stenzel T*S3]
geometry CalabiYau6
dimension 6
rate -3
link T11
betti 0:1 3:1
euclidean false

[CandelasDeLaOssa]
geometry CalabiYau6
dimension 6
rate -2
link T11
betti 0:1 2:1
euclidean false

[Calabi O(-3)]
geometry CalabiYau6
dimension 6
rate -6
link S5/Z3
betti 0:1 2:1 4:1
class omega nonzero
euclidean false

[Euclidean R6]
geometry CalabiYau6
dimension 6
rate -inf
link S5
betti 0:1
euclidean true
)";
}

const std::vector<ACSpaceRecord>& catalog() {
  static const std::vector<ACSpaceRecord> records = parse_catalog(catalog_text());
  return records;
}

const ACSpaceRecord& lookup(std::string_view name) {
  const auto& all = catalog();
  for (const auto& rec : all)
    if (rec.name == name) return rec;
  auto squash = [](std::string_view s) {
    std::string out;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = squash(name);
  for (const auto& rec : all)
    if (squash(rec.name) == key) return rec;
  throw ValidationError("no catalog entry named '" + std::string(name) + "'");
}

// ------------------------------------------------------------------ equations

namespace {

double polyform_norm(const PolyForm<Rational>& a) {
  Rational sum(0);
  for (const auto& p : a.coeffs())
    for (const auto& [m, c] : p.terms()) sum += c * c;
  return std::sqrt(to_double(sum));
}

double coneform_norm(const ConeForm& a) {
  Rational sum(0);
  for (const auto& [key, c] : a.terms()) sum += c * c;
  return std::sqrt(to_double(sum));
}

}  // namespace

ObstructionResidual verify_obstruction_equation(const std::string& equation, const PolyForm<Rational>& eta,
                                                const PolyForm<Rational>& rhs) {
  if (eta.dim() != rhs.dim() || eta.degree() + 1 != rhs.degree())
    throw ContextMismatch("d eta and rhs live in different spaces: eta is a " + std::to_string(eta.degree()) +
                          "-form on R^" + std::to_string(eta.dim()) + ", rhs a " + std::to_string(rhs.degree()) +
                          "-form on R^" + std::to_string(rhs.dim()));
  const PolyForm<Rational> residual = poly_d(eta) - rhs;
  return {equation, residual.is_zero(), polyform_norm(residual), format_polyform(residual)};
}

ObstructionResidual verify_obstruction_equation(const std::string& equation, const ConeForm& eta, const ConeForm& rhs,
                                                const LinkComplex& link) {
  int k_eta = -1, k_rhs = -1;
  try {
    k_eta = cone_degree(eta, link);
    k_rhs = cone_degree(rhs, link);
  } catch (const ValidationError& e) {
    throw ContextMismatch(std::string("forms do not fit the link tables: ") + e.what());
  }
  if (k_eta >= 0 && k_rhs >= 0 && k_eta + 1 != k_rhs)
    throw ContextMismatch("degree mismatch: eta has degree " + std::to_string(k_eta) + ", rhs " + std::to_string(k_rhs));
  const ConeForm residual = cone_d(eta, link) - rhs;
  return {equation, residual.is_zero(), coneform_norm(residual), format_cone_form(residual, link)};
}

FlatObstructionSolution flat_g2_obstruction_solution() {
  const auto phi = reference_phi<Rational>();
  const auto du = exterior_derivative(half_radius_squared<Rational>(7));
  FlatObstructionSolution out{hodge_star(wedge(du, phi)), Rational(0), PolyForm<Rational>(7, 3),
                              Rational(4) * PolyForm<Rational>::from_constant(hitchin_dual_3form_7d(phi)), {}};
  const PolyForm<Rational> d_candidate = poly_d(out.candidate);
  Rational dot(0), norm2(0);
  for (int i = 0; i < static_cast<int>(d_candidate.coeffs().size()); ++i)
    for (const auto& [m, c] : d_candidate.coeff(i).terms()) {
      norm2 += c * c;
      dot += c * out.rhs.coeff(i).coefficient(m);
    }
  out.constant = norm2 == 0 ? Rational(0) : dot / norm2;
  out.eta = out.constant * out.candidate;
  out.residual = verify_obstruction_equation("d eta = 4 Theta(phi0)", out.eta, out.rhs);
  return out;
}

std::string format_residual(const ObstructionResidual& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", r.norm);
  return r.equation + ": residual " + (r.zero ? "0 (exact)" : std::string(buf)) + "\n";
}

}  // namespace holonomy
