#pragma once

// Verdict engine for desingularizations of nearly G2 / nearly Kähler conifolds
// by asymptotically conical spaces, and exact checks of the obstruction
// equations dη = 4Θ(φ), dν = −3ReΩ, dη = 2ω².

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holonomy/cones.hpp"
#include "holonomy/polyform.hpp"
#include "holonomy/scalar.hpp"
#include "holonomy/stable_forms.hpp"

namespace holonomy {

enum class Geometry { G2, CalabiYau6 };
const char* to_string(Geometry g);

/// Cohomology class of a closed form, as catalog data.
enum class ClassFlag { Unknown, Zero, Nonzero };
const char* to_string(ClassFlag f);

struct ACSpaceRecord {
  std::string name;
  Geometry geometry = Geometry::G2;
  int dimension = 7;
  double rate = -1.0;  // -inf for flat space
  std::string link;
  std::map<int, int> betti;  // missing degrees are 0
  // Keys: star_phi (degree 4), omega (2), omega2 (4), re_omega (3), im_omega (3).
  std::map<std::string, ClassFlag> classes;
  bool euclidean = false;

  int betti_number(int k) const;
  /// Declared flag, or Zero when the degree's Betti number vanishes.
  ClassFlag class_of(const std::string& form) const;
  void validate() const;
};

int class_degree(const std::string& form);

struct Verdict {
  enum class Kind { ForcedEuclidean, ObstructedNoDesingularization, TheoremInapplicable, ConclusionExactnessRequired };

  Kind kind = Kind::TheoremInapplicable;
  std::string reason;               // TheoremInapplicable
  std::vector<std::string> forms;   // blocking forms, or forms that must be exact
  std::string provenance;           // e.g. "Theorem A/C"
  std::vector<std::string> notes;
};
const char* to_string(Verdict::Kind k);

/// −7/2 and −3.
constexpr double kG2RateThreshold = -3.5;
constexpr double kSU3RateThreshold = -3.0;

Verdict g2_verdict(const ACSpaceRecord& rec);

/// Theorem D as stated pairs ω² with ReΩ; its proof uses ω² and ImΩ.
enum class SU3Reading { Stated, Proof };
Verdict su3_verdict(const ACSpaceRecord& rec, SU3Reading reading = SU3Reading::Stated);

/// Dispatches on geometry; CY records report both readings.
std::string format_verdicts(const ACSpaceRecord& rec);
std::string format_verdict(const Verdict& v);

// ------------------------------------------------------------------ catalog

std::vector<ACSpaceRecord> parse_catalog(std::string_view text);
std::string format_catalog(const std::vector<ACSpaceRecord>& records);
const char* catalog_text();
const std::vector<ACSpaceRecord>& catalog();
/// Exact name match first, then case-insensitive match ignoring spaces.
const ACSpaceRecord& lookup(std::string_view name);

// ------------------------------------------------------------------ equations

struct ObstructionResidual {
  std::string equation;
  bool zero = false;
  double norm = 0.0;  // Euclidean norm of the residual coefficient vector
  std::string residual;
};

/// dη − rhs in flat polynomial calculus.
ObstructionResidual verify_obstruction_equation(const std::string& equation, const PolyForm<Rational>& eta,
                                                const PolyForm<Rational>& rhs);
/// dη − rhs in cone calculus over `link`.
ObstructionResidual verify_obstruction_equation(const std::string& equation, const ConeForm& eta, const ConeForm& rhs,
                                                const LinkComplex& link);

struct FlatObstructionSolution {
  PolyForm<Rational> candidate;
  Rational constant;
  PolyForm<Rational> eta;
  PolyForm<Rational> rhs;
  ObstructionResidual residual;
};

/// Flat ℝ⁷: rhs = 4Θ(φ₀), candidate *(du∧φ₀) with u = |x|²/2, constant by exact projection.
FlatObstructionSolution flat_g2_obstruction_solution();

std::string format_residual(const ObstructionResidual& r);

}  // namespace holonomy
