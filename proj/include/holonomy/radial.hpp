#pragma once

// Radial analysis on warped products dr² + f(r)² g_L: indicial roots of the
// cone Laplacian, weighted norms, the approximate-potential ODE and its decay
// rate, and the Hessian test behind Tashiro's rigidity theorem.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace holonomy {

struct RadialField {
  std::vector<double> r;
  std::vector<double> values;

  std::size_t size() const { return r.size(); }
  void validate() const;
};

/// `nodes` radii spaced uniformly in log r over [r0, r_max].
std::vector<double> log_grid(double r0, double r_max, int nodes);

RadialField sample_field(const std::vector<double>& grid, const std::function<double(double)>& u);

class WarpedMetric {
 public:
  enum class Kind { Euclidean, PerturbedCone, Tabulated };

  static WarpedMetric euclidean(int n, double r0, double r_max);
  /// f(r) = r(1 + c r^ν), ν < 0.
  static WarpedMetric perturbed_cone(int n, double c, double nu, double r0, double r_max);
  /// Monotone cubic interpolation through (r, f) samples; `rate` is the
  /// asserted decay rate, if any.
  static WarpedMetric tabulated(int n, std::vector<double> r, std::vector<double> f,
                                std::optional<double> rate = std::nullopt);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  double r0() const { return r0_; }
  double r_max() const { return r_max_; }
  double c() const { return c_; }
  std::optional<double> rate() const { return rate_; }
  std::string describe() const;

  /// Volume of the link (g_L); scales every weighted norm. Defaults to 1.
  double link_volume() const { return link_volume_; }
  void set_link_volume(double v);

  double f(double r) const;
  double f_prime(double r) const;
  /// q = r f'/f.
  double q(double r) const;
  /// q − 1, evaluated without cancellation where the profile allows it.
  double q_minus_one(double r) const;

  /// max over samples of |f/r − 1| · r^{−ν}; bounded iff the rate claim holds.
  double rate_constant(const std::vector<double>& grid) const;

 private:
  WarpedMetric() = default;
  void check_domain() const;

  Kind kind_ = Kind::Euclidean;
  int n_ = 0;
  double r0_ = 1.0;
  double r_max_ = 1.0;
  double c_ = 0.0;
  std::optional<double> rate_;
  double link_volume_ = 1.0;
  struct Table;
  std::shared_ptr<const Table> table_;
};

// ------------------------------------------------------------------ rates

struct SpectrumEntry {
  double mu = 0.0;
  int multiplicity = 1;
};

struct CriticalRate {
  double lambda = 0.0;
  double mu = 0.0;
  int multiplicity = 1;
  bool upper = true;  // the root ≥ 0 of λ(λ + n − 2) = μ
};

struct CriticalRateSet {
  int n = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<CriticalRate> rates;  // sorted by λ, descending

  bool empty() const { return rates.empty(); }
};

/// Roots λ = (2−n)/2 ± √(((n−2)/2)² + μ) in the closed window [lo, hi].
/// The upper root is evaluated as μ / (√(…) + (n−2)/2), so it is never negative.
CriticalRateSet critical_rates(const std::vector<SpectrumEntry>& spectrum, int n, double lo, double hi);
CriticalRateSet critical_rates(const std::vector<double>& spectrum, int n, double lo, double hi);

/// Laplace spectrum of the round unit sphere S^m: μ_k = k(k + m − 1) with the
/// dimension of degree-k harmonic polynomials as multiplicity, k ≤ k_max.
std::vector<SpectrumEntry> sphere_spectrum(int m, int k_max);

std::string format_rates(const CriticalRateSet& set);

// ------------------------------------------------------------------ norms

/// First and second derivatives by three-point differences on a non-uniform grid.
std::vector<double> derivative(const RadialField& u);
std::vector<double> second_derivative(const RadialField& u);

/// (Σ_{j≤l} ∫ |r^{j−λ} ∇^j u|^p r^{−n} f^{n−1} V_L dr)^{1/p} by the trapezoid
/// rule, for radial u; |∇²u|² = u''² + (n−1)(f'u'/f)².
double weighted_norm(const RadialField& u, int l, double lambda, double p, const WarpedMetric& metric);

/// For u = r^a on the exact cone, the l = 0 integrand decays like r^{p(a−λ)−1};
/// the norm over [r0, ∞) is finite iff a < λ.
bool power_law_norm_finite(double a, double lambda, double p);

// ------------------------------------------------------------------ Laplacian

/// Δu = −u'' − (n−1)(f'/f)u' with finite-difference derivatives.
RadialField cone_laplacian(const RadialField& u, const WarpedMetric& metric);
/// Same with derivatives supplied in closed form.
RadialField cone_laplacian(const std::vector<double>& grid, const std::function<double(double)>& du,
                           const std::function<double(double)>& d2u, const WarpedMetric& metric);
/// Δr² + 2n = −2(n−1)(q − 1).
RadialField laplacian_r2_defect(const std::vector<double>& grid, const WarpedMetric& metric);

struct FitOptions {
  double window_lo = 0.25;  // fraction of the log-radius span
  double window_hi = 0.75;
  double floor = 1e-13;     // nodes with |v| below this are dropped
};

/// Least-squares slope of log|v| against log r inside the window; empty when
/// fewer than two nodes survive the floor.
std::optional<double> fit_decay_exponent(const RadialField& v, const FitOptions& options = {});

// ------------------------------------------------------------------ potential

struct PotentialOptions {
  int nodes = 10000;
  enum class Inner { Neumann, Dirichlet } inner = Inner::Neumann;
  FitOptions fit;
};

struct PotentialSolution {
  RadialField u;
  RadialField v;  // u − r²/2
  std::optional<double> exponent;
  double max_abs_v = 0.0;
  double max_equation_residual = 0.0;  // |Δu + n| on interior nodes, finite differences
  double step = 0.0;                   // uniform step in log r
};

/// Solves Δu = −n for u = r²/2 + v with v'(r0) = 0 (or v(r0) = 0) and
/// v(R_max) = 0, using central differences in t = log r and a sparse LU solve.
PotentialSolution solve_potential(const WarpedMetric& metric, const PotentialOptions& options = {});

struct TashiroVerdict {
  bool exact = false;
  double radial_deviation = 0.0;     // max |u'' − 1|
  double spherical_deviation = 0.0;  // max |(f'/f) u' − 1|
  double deviation() const { return std::max(radial_deviation, spherical_deviation); }
};

/// Compares Hess u with g on both blocks; exact iff the deviation is below tol.
/// Works on v = u − r²/2 so an exact potential gives deviation 0 exactly.
TashiroVerdict tashiro_check(const RadialField& u, const WarpedMetric& metric, double tol = 1e-8);

std::string format_solution(const PotentialSolution& s);
void write_columns(const std::string& path, const PotentialSolution& s);

}  // namespace holonomy
