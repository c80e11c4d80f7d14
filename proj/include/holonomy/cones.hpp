#pragma once

// Exact calculus on cones (0,∞) × L with g_C = dr² + r² g_L. The link L is not
// discretized; it is presented by generators and structure tables for d, ∧
// and the link Hodge star, all with rational coefficients.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "holonomy/scalar.hpp"
#include "holonomy/kform.hpp"
#include "holonomy/stable_forms.hpp"

namespace holonomy {

/// Rational linear combination of link generators, keyed by generator index.
using LinkElement = std::map<int, Rational>;

struct LinkGenerator {
  std::string name;
  int degree = 0;
};

struct AuditReport {
  std::vector<std::string> failures;
  int checks = 0;
  bool ok() const { return failures.empty(); }
};

class LinkComplex {
 public:
  static constexpr int kUnit = 0;

  LinkComplex(std::string name, int link_dim);

  const std::string& name() const { return name_; }
  int link_dim() const { return dim_; }
  const std::vector<LinkGenerator>& generators() const { return gens_; }
  int generator_count() const { return static_cast<int>(gens_.size()); }

  int add_generator(const std::string& name, int degree);
  int index_of(std::string_view name) const;
  bool has_generator(std::string_view name) const;
  int degree_of(int gen) const { return gens_.at(gen).degree; }
  const std::string& name_of(int gen) const { return gens_.at(gen).name; }

  void set_d(int gen, LinkElement value);
  void set_wedge(int a, int b, LinkElement value);
  void set_star(int gen, LinkElement value);
  void set_volume(LinkElement value) { volume_ = std::move(value); }

  bool has_star() const { return !star_.empty(); }
  const LinkElement& volume() const { return volume_; }

  /// Degree of a homogeneous element; -1 for zero. Throws on mixed degrees.
  int degree(const LinkElement& a) const;

  LinkElement d(const LinkElement& a) const;
  LinkElement wedge(const LinkElement& a, const LinkElement& b) const;
  LinkElement star(const LinkElement& a) const;

  LinkElement element(std::string_view gen, const Rational& c = Rational(1)) const;

  /// d² = 0, degree consistency, graded commutativity, associativity, Leibniz
  /// rule and the double-star sign, all through the tables.
  AuditReport audit() const;

  // Raw tables, for serialization.
  const std::map<int, LinkElement>& d_table() const { return d_; }
  const std::map<std::pair<int, int>, LinkElement>& wedge_table() const { return wedge_; }
  const std::map<int, LinkElement>& star_table() const { return star_; }

 private:
  LinkElement d_generator(int gen) const;
  LinkElement wedge_generators(int a, int b) const;

  std::string name_;
  int dim_;
  std::vector<LinkGenerator> gens_;
  std::map<int, LinkElement> d_;
  std::map<std::pair<int, int>, LinkElement> wedge_;
  std::map<int, LinkElement> star_;
  LinkElement volume_;
};

LinkElement& accumulate(LinkElement& into, const LinkElement& a, const Rational& scale = Rational(1));
LinkElement scaled(const LinkElement& a, const Rational& s);
bool is_zero(const LinkElement& a);

/// Parses the text table format:
///   link <name> dim <m>
///   gen <name> <degree>
///   volume <combination>
///   d <gen> = <combination>
///   <gen> ^ <gen> = <combination>
///   * <gen> = <combination>
/// Combinations read like "-3 ReOmega + 2/3 omega3"; a bare number is a
/// multiple of the unit "1". Lines starting with '#' are comments.
LinkComplex parse_link_complex(std::string_view text);
LinkComplex load_link_complex(const std::string& path);
std::string format_link_complex(const LinkComplex& link);

LinkElement parse_link_element(const LinkComplex& link, std::string_view text, int line = 0);
std::string format_link_element(const LinkComplex& link, const LinkElement& a);

/// Nearly Kähler link with λ = 1: dω = −3ReΩ, dImΩ = 2ω², ReΩ∧ImΩ = ⅔ω³.
LinkComplex nk_link_preset();
/// Sasaki–Einstein 5-dimensional link of a Calabi–Yau cone.
LinkComplex cy_link_preset();
const char* nk_link_text();
const char* cy_link_text();

/// Checks the wedge and star tables of `link` against constant forms on R^m
/// standing in for the generators at one point (identity metric).
AuditReport pointwise_model_audit(const LinkComplex& link, const std::map<std::string, KFormQ>& model);
std::map<std::string, KFormQ> nk_pointwise_model();
std::map<std::string, KFormQ> cy_pointwise_model();

/// Derivative data of the link SU(3) structure in generator coordinates.
SU3DerivativeData link_su3_derivative_data(const LinkComplex& link);

// ------------------------------------------------------------------ cone forms

/// Σ c · r^p β (radial = false) or c · r^p dr∧β (radial = true), β a generator.
class ConeForm {
 public:
  using Key = std::tuple<Rational, bool, int>;

  ConeForm() = default;

  static ConeForm pure(const Rational& p, const LinkElement& beta);
  static ConeForm dr_wedge(const Rational& p, const LinkElement& alpha);

  const std::map<Key, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add(const Rational& p, bool radial, int gen, const Rational& c);

  ConeForm& operator+=(const ConeForm& o);
  ConeForm& operator-=(const ConeForm& o);
  ConeForm& operator*=(const Rational& s);
  friend ConeForm operator+(ConeForm a, const ConeForm& b) { return a += b; }
  friend ConeForm operator-(ConeForm a, const ConeForm& b) { return a -= b; }
  friend ConeForm operator-(ConeForm a) { return a *= Rational(-1); }
  friend ConeForm operator*(const Rational& s, ConeForm a) { return a *= s; }
  friend bool operator==(const ConeForm& a, const ConeForm& b) { return a.terms_ == b.terms_; }

 private:
  std::map<Key, Rational> terms_;
};

/// Total degree (dr counts 1); -1 for zero. Throws on mixed degree.
int cone_degree(const ConeForm& a, const LinkComplex& link);
void validate(const ConeForm& a, const LinkComplex& link);

ConeForm cone_d(const ConeForm& a, const LinkComplex& link);
ConeForm cone_wedge(const ConeForm& a, const ConeForm& b, const LinkComplex& link);
/// Hodge star of g_C with orientation dr ∧ vol_L; n = link dim + 1.
ConeForm cone_hodge(const ConeForm& a, const LinkComplex& link);
/// d* = (−1)^{n(k+1)+1} * d * on k-forms.
ConeForm cone_codifferential(const ConeForm& a, const LinkComplex& link);
/// Interior product with the radial field r∂_r.
ConeForm radial_contract(const ConeForm& a);
/// L_{r∂r} = ι_{r∂r} d + d ι_{r∂r}.
ConeForm lie_radial(const ConeForm& a, const LinkComplex& link);

struct Homogeneity {
  enum class Kind { Zero, Homogeneous, Mixed } kind = Kind::Zero;
  Rational rate;  // valid for Homogeneous: L_{r∂r} a = (k + rate) a
};
Homogeneity homogeneity_rate(const ConeForm& a, const LinkComplex& link);

/// Pullback by the dilation r ↦ t r.
ConeForm dilate(const ConeForm& a, const Rational& t);

/// Coefficient vector keyed by "r^p dr gen" labels.
std::map<std::string, double> labeled_coefficients(const ConeForm& a, const LinkComplex& link);
std::string format_cone_form(const ConeForm& a, const LinkComplex& link);

/// φ_C = r³ReΩ − r²dr∧ω and ψ_C = −r³dr∧ImΩ − ½r⁴ω² over a nearly Kähler link.
ConeForm g2_cone_form(const LinkComplex& link);
ConeForm g2_cone_dual(const LinkComplex& link);

struct CYConeForms {
  ConeForm omega;     // r dr∧θ + r²ω_T
  ConeForm re_omega;  // r²dr∧ReΩ_T − r³θ∧ImΩ_T
  ConeForm im_omega;  // r²dr∧ImΩ_T + r³θ∧ReΩ_T
};
CYConeForms cy_cone_forms(const LinkComplex& link);

/// η = c · candidate, with c the exact projection coefficient of rhs onto d(candidate).
struct ObstructionSolution {
  std::string equation;
  ConeForm candidate;
  Rational constant;
  ConeForm eta;
  ConeForm rhs;
  ConeForm residual;  // dη − rhs
};

struct ConeObstructionSolutions {
  std::vector<ObstructionSolution> solutions;
};

/// G₂ case: dη = 4ψ_C with candidate *(d(r²/2)∧φ_C).
ObstructionSolution g2_cone_obstruction_solution(const LinkComplex& nk_link);
/// Calabi–Yau case: dν = −3ReΩ_C and dη = 2ω_C², candidates *(d(r²/2)∧ImΩ_C)
/// and *(d(r²/2)∧ω_C).
std::vector<ObstructionSolution> cy_cone_obstruction_solutions(const LinkComplex& cy_link);

ObstructionSolution solve_by_projection(const std::string& equation, const ConeForm& candidate, const ConeForm& rhs,
                                        const LinkComplex& link);

/// d(r²/2) = r dr.
ConeForm radial_potential_differential();

}  // namespace holonomy
