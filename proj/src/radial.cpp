#include "holonomy/radial.hpp"

#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

// This Boost release calls isnan unqualified inside pchip.hpp.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <cstdio>
#include <fstream>

#include "holonomy/errors.hpp"

namespace holonomy {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x == 0.0 ? 0.0 : x);
  return buf;
}

}  // namespace

void RadialField::validate() const {
  if (r.size() != values.size()) throw DimensionMismatch("radial field has mismatched grid and values");
  if (r.size() < 3) throw ValidationError("radial field needs at least 3 nodes");
  if (r.front() <= 0.0) throw ValidationError("radial grid must be positive");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw ValidationError("radial grid must be strictly increasing");
}

std::vector<double> log_grid(double r0, double r_max, int nodes) {
  if (!(r0 > 0.0) || !(r_max > r0)) throw ValidationError("log grid needs 0 < r0 < r_max");
  if (nodes < 3) throw ValidationError("log grid needs at least 3 nodes");
  std::vector<double> r(nodes);
  const double a = std::log(r0), b = std::log(r_max);
  for (int i = 0; i < nodes; ++i) r[i] = std::exp(a + (b - a) * i / (nodes - 1));
  r.front() = r0;
  r.back() = r_max;
  return r;
}

RadialField sample_field(const std::vector<double>& grid, const std::function<double(double)>& u) {
  RadialField out{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = u(grid[i]);
  return out;
}

// ------------------------------------------------------------------ metric

struct WarpedMetric::Table {
  boost::math::interpolators::pchip<std::vector<double>> spline;
  Table(std::vector<double> r, std::vector<double> f) : spline(std::move(r), std::move(f)) {}
};

WarpedMetric WarpedMetric::euclidean(int n, double r0, double r_max) {
  WarpedMetric m;
  m.kind_ = Kind::Euclidean;
  m.n_ = n;
  m.r0_ = r0;
  m.r_max_ = r_max;
  m.check_domain();
  return m;
}

WarpedMetric WarpedMetric::perturbed_cone(int n, double c, double nu, double r0, double r_max) {
  if (!(nu < 0.0)) throw RateOutOfRange("perturbed cone needs rate nu < 0, got " + fmt(nu));
  WarpedMetric m;
  m.kind_ = Kind::PerturbedCone;
  m.n_ = n;
  m.c_ = c;
  m.rate_ = nu;
  m.r0_ = r0;
  m.r_max_ = r_max;
  m.check_domain();
  return m;
}

WarpedMetric WarpedMetric::tabulated(int n, std::vector<double> r, std::vector<double> f, std::optional<double> rate) {
  if (r.size() != f.size()) throw DimensionMismatch("profile table has mismatched columns");
  if (r.size() < 4) throw ValidationError("profile table needs at least 4 samples");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0 && !(r[i] > r[i - 1])) throw ValidationError("profile radii must be strictly increasing");
    if (!(f[i] > 0.0)) throw ValidationError("profile must be positive");
  }
  if (rate && !(*rate < 0.0)) throw RateOutOfRange("asserted rate must be negative");
  WarpedMetric m;
  m.kind_ = Kind::Tabulated;
  m.n_ = n;
  m.r0_ = r.front();
  m.r_max_ = r.back();
  m.rate_ = rate;
  m.table_ = std::make_shared<const Table>(std::move(r), std::move(f));
  m.check_domain();
  return m;
}

void WarpedMetric::check_domain() const {
  if (n_ < 3 || n_ > 16) throw DimensionMismatch("warped metric dimension out of range");
  if (!(r0_ > 0.0) || !(r_max_ > r0_)) throw ValidationError("warped metric needs 0 < r0 < r_max");
  // 1 + c r^ν is monotone in r, so positivity at both ends suffices.
  if (kind_ == Kind::PerturbedCone)
    for (double r : {r0_, r_max_})
      if (!(1.0 + c_ * std::pow(r, *rate_) > 0.0)) throw ValidationError("warp profile is not positive on the domain");
}

void WarpedMetric::set_link_volume(double v) {
  if (!(v > 0.0)) throw ValidationError("link volume must be positive");
  link_volume_ = v;
}

std::string WarpedMetric::describe() const {
  switch (kind_) {
    case Kind::Euclidean: return "Euclidean n=" + std::to_string(n_);
    case Kind::PerturbedCone:
      return "PerturbedCone n=" + std::to_string(n_) + " c=" + fmt(c_) + " nu=" + fmt(*rate_);
    case Kind::Tabulated: return "Tabulated n=" + std::to_string(n_);
  }
  return "?";
}

double WarpedMetric::f(double r) const {
  switch (kind_) {
    case Kind::Euclidean: return r;
    case Kind::PerturbedCone: return r * (1.0 + c_ * std::pow(r, *rate_));
    case Kind::Tabulated: return table_->spline(r);
  }
  return r;
}

double WarpedMetric::f_prime(double r) const {
  switch (kind_) {
    case Kind::Euclidean: return 1.0;
    case Kind::PerturbedCone: return 1.0 + c_ * (1.0 + *rate_) * std::pow(r, *rate_);
    case Kind::Tabulated: return table_->spline.prime(r);
  }
  return 1.0;
}

double WarpedMetric::q(double r) const { return 1.0 + q_minus_one(r); }

double WarpedMetric::q_minus_one(double r) const {
  switch (kind_) {
    case Kind::Euclidean: return 0.0;
    case Kind::PerturbedCone: {
      const double s = c_ * std::pow(r, *rate_);
      return *rate_ * s / (1.0 + s);
    }
    case Kind::Tabulated: return r * f_prime(r) / f(r) - 1.0;
  }
  return 0.0;
}

double WarpedMetric::rate_constant(const std::vector<double>& grid) const {
  double worst = 0.0;
  for (double r : grid) {
    double dev = std::abs(f(r) / r - 1.0);
    if (rate_) dev *= std::pow(r, -*rate_);
    worst = std::max(worst, dev);
  }
  return worst;
}

// ------------------------------------------------------------------ rates

CriticalRateSet critical_rates(const std::vector<SpectrumEntry>& spectrum, int n, double lo, double hi) {
  if (n < 3) throw DimensionMismatch("critical rates need n >= 3");
  if (lo > hi) throw ValidationError("empty rate window");
  CriticalRateSet out{n, lo, hi, {}};
  const double half = (n - 2) / 2.0;
  for (const auto& e : spectrum) {
    if (!(e.mu >= 0.0)) throw ValidationError("link eigenvalues must be non-negative, got " + fmt(e.mu));
    if (e.multiplicity < 1) throw ValidationError("multiplicity must be positive");
    const double s = std::sqrt(half * half + e.mu);
    const double upper = e.mu / (s + half);
    const double lower = (2.0 - n) - upper;
    for (const auto& [lambda, is_upper] : {std::pair{upper, true}, std::pair{lower, false}}) {
      if (lambda < lo || lambda > hi) continue;
      bool merged = false;
      for (auto& existing : out.rates)
        if (existing.lambda == lambda) {
          existing.multiplicity += e.multiplicity;
          merged = true;
        }
      if (!merged) out.rates.push_back({lambda, e.mu, e.multiplicity, is_upper});
    }
  }
  std::sort(out.rates.begin(), out.rates.end(), [](const auto& a, const auto& b) { return a.lambda > b.lambda; });
  return out;
}

CriticalRateSet critical_rates(const std::vector<double>& spectrum, int n, double lo, double hi) {
  std::vector<SpectrumEntry> entries;
  for (double mu : spectrum) entries.push_back({mu, 1});
  return critical_rates(entries, n, lo, hi);
}

std::vector<SpectrumEntry> sphere_spectrum(int m, int k_max) {
  if (m < 1) throw DimensionMismatch("sphere dimension must be positive");
  if (k_max < 0) throw ValidationError("k_max must be non-negative");
  auto binom = [](int a, int b) {
    if (b < 0 || a < b) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  std::vector<SpectrumEntry> out;
  for (int k = 0; k <= k_max; ++k) {
    // Harmonic polynomials of degree k in m+1 variables.
    const double mult = binom(k + m, m) - binom(k + m - 2, m);
    out.push_back({static_cast<double>(k) * (k + m - 1), static_cast<int>(std::lround(mult))});
  }
  return out;
}

std::string format_rates(const CriticalRateSet& set) {
  std::string out = "critical rates in [" + fmt(set.window_lo) + ", " + fmt(set.window_hi) + "]: {";
  for (std::size_t i = 0; i < set.rates.size(); ++i) {
    if (i) out += ", ";
    out += fmt(set.rates[i].lambda);
  }
  out += "}\n";
  // The excluded window (2−n, 0) as seen from this output.
  const double a = 2.0 - set.n;
  bool hit = false;
  for (const auto& r : set.rates) hit = hit || (r.lambda > a && r.lambda < 0.0);
  out += "excluded window (" + fmt(a) + ", 0): " + (hit ? "VIOLATED" : "empty") + "\n";
  return out;
}

// ------------------------------------------------------------------ differences

std::vector<double> derivative(const RadialField& u) {
  u.validate();
  const auto& r = u.r;
  const auto& y = u.values;
  const std::size_t N = r.size();
  std::vector<double> d(N);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] + h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {
    const double h1 = r[1] - r[0], h2 = r[2] - r[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] - h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    const double h1 = r[N - 2] - r[N - 3], h2 = r[N - 1] - r[N - 2];
    d[N - 1] = h2 / (h1 * (h1 + h2)) * y[N - 3] - (h1 + h2) / (h1 * h2) * y[N - 2] +
               (2 * h2 + h1) / (h2 * (h1 + h2)) * y[N - 1];
  }
  return d;
}

std::vector<double> second_derivative(const RadialField& u) {
  u.validate();
  const auto& r = u.r;
  const auto& y = u.values;
  const std::size_t N = r.size();
  std::vector<double> d(N);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double h1 = r[i] - r[i - 1], h2 = r[i + 1] - r[i];
    d[i] = 2.0 * (y[i - 1] / (h1 * (h1 + h2)) - y[i] / (h1 * h2) + y[i + 1] / (h2 * (h1 + h2)));
  }
  d[0] = d[1];
  d[N - 1] = d[N - 2];
  return d;
}

// ------------------------------------------------------------------ norms

double weighted_norm(const RadialField& u, int l, double lambda, double p, const WarpedMetric& metric) {
  u.validate();
  if (l < 0 || l > 2) throw ValidationError("weighted norms are available for l = 0, 1, 2");
  if (!(p > 0.0)) throw ValidationError("exponent p must be positive");
  const double slack = 1e-12 * metric.r_max();
  if (u.r.front() < metric.r0() - slack || u.r.back() > metric.r_max() + slack)
    throw ValidationError("field is sampled outside the metric's domain");
  const int n = metric.dim();
  std::vector<double> d1, d2;
  if (l >= 1) d1 = derivative(u);
  if (l >= 2) d2 = second_derivative(u);
  std::vector<double> integrand(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = u.r[i];
    const double f = metric.f(r);
    double sum = std::pow(std::pow(r, -lambda) * std::abs(u.values[i]), p);
    if (l >= 1) sum += std::pow(std::pow(r, 1.0 - lambda) * std::abs(d1[i]), p);
    if (l >= 2) {
      const double spherical = metric.f_prime(r) / f * d1[i];
      const double hess = std::sqrt(d2[i] * d2[i] + (n - 1) * spherical * spherical);
      sum += std::pow(std::pow(r, 2.0 - lambda) * hess, p);
    }
    integrand[i] = sum * std::pow(r, -n) * std::pow(f, n - 1) * metric.link_volume();
  }
  double total = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) total += 0.5 * (integrand[i] + integrand[i - 1]) * (u.r[i] - u.r[i - 1]);
  return std::pow(total, 1.0 / p);
}

bool power_law_norm_finite(double a, double lambda, double p) { return p * (a - lambda) - 1.0 < -1.0; }

// ------------------------------------------------------------------ Laplacian

RadialField cone_laplacian(const RadialField& u, const WarpedMetric& metric) {
  const auto d1 = derivative(u);
  const auto d2 = second_derivative(u);
  RadialField out{u.r, std::vector<double>(u.size())};
  const int n = metric.dim();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = u.r[i];
    out.values[i] = -d2[i] - (n - 1) * metric.q(r) / r * d1[i];
  }
  return out;
}

RadialField cone_laplacian(const std::vector<double>& grid, const std::function<double(double)>& du,
                           const std::function<double(double)>& d2u, const WarpedMetric& metric) {
  const int n = metric.dim();
  return sample_field(grid, [&](double r) { return -d2u(r) - (n - 1) * metric.q(r) / r * du(r); });
}

RadialField laplacian_r2_defect(const std::vector<double>& grid, const WarpedMetric& metric) {
  const int n = metric.dim();
  return sample_field(grid, [&](double r) { return -2.0 * (n - 1) * metric.q_minus_one(r); });
}

std::optional<double> fit_decay_exponent(const RadialField& v, const FitOptions& options) {
  v.validate();
  const double a = std::log(v.r.front()), b = std::log(v.r.back());
  const double lo = a + options.window_lo * (b - a), hi = a + options.window_hi * (b - a);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = std::log(v.r[i]);
    if (x < lo || x > hi) continue;
    const double magnitude = std::abs(v.values[i]);
    if (!(magnitude >= options.floor)) continue;
    const double y = std::log(magnitude);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / denom;
}

// ------------------------------------------------------------------ potential

PotentialSolution solve_potential(const WarpedMetric& metric, const PotentialOptions& options) {
  if (const auto nu = metric.rate(); nu && !(*nu < -2.0))
    throw RateOutOfRange("the potential theorem needs rate nu < -2, got " + fmt(*nu));
  const int N = options.nodes;
  const auto grid = log_grid(metric.r0(), metric.r_max(), N);
  const int n = metric.dim();
  const double h = (std::log(metric.r_max()) - std::log(metric.r0())) / (N - 1);

  // In t = log r: −v_tt + (1 − (n−1)q) v_t = r² (n−1)(q − 1).
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  const double diag = 2.0 / (h * h);
  const double off = -1.0 / (h * h);
  for (int i = 0; i < N - 1; ++i) {
    const double r = grid[i];
    const double qm1 = metric.q_minus_one(r);
    const double b = 1.0 - (n - 1) * (1.0 + qm1);
    rhs(i) = r * r * (n - 1) * qm1;
    if (i == 0) {
      if (options.inner == PotentialOptions::Inner::Dirichlet) {
        triplets.emplace_back(0, 0, 1.0);
        rhs(0) = 0.0;
      } else {
        // Ghost node v_{−1} = v_1 enforces v_t = 0, and the drift term drops out.
        triplets.emplace_back(0, 0, diag);
        triplets.emplace_back(0, 1, 2.0 * off);
      }
      continue;
    }
    triplets.emplace_back(i, i - 1, off - b / (2.0 * h));
    triplets.emplace_back(i, i, diag);
    triplets.emplace_back(i, i + 1, off + b / (2.0 * h));
  }
  triplets.emplace_back(N - 1, N - 1, 1.0);
  rhs(N - 1) = 0.0;

  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw ComputationError("potential solve: factorization failed");
  const Eigen::VectorXd v = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !v.allFinite()) throw ComputationError("potential solve: back substitution failed");

  PotentialSolution out;
  out.step = h;
  out.v = RadialField{grid, std::vector<double>(v.data(), v.data() + N)};
  out.u = RadialField{grid, std::vector<double>(N)};
  for (int i = 0; i < N; ++i) {
    out.u.values[i] = 0.5 * grid[i] * grid[i] + v(i);
    out.max_abs_v = std::max(out.max_abs_v, std::abs(v(i)));
  }
  out.exponent = fit_decay_exponent(out.v, options.fit);

  const auto lap_v = cone_laplacian(out.v, metric);
  for (int i = 1; i < N - 1; ++i)
    out.max_equation_residual =
        std::max(out.max_equation_residual, std::abs(lap_v.values[i] - (n - 1) * metric.q_minus_one(grid[i])));
  return out;
}

TashiroVerdict tashiro_check(const RadialField& u, const WarpedMetric& metric, double tol) {
  u.validate();
  RadialField v = u;
  for (std::size_t i = 0; i < v.size(); ++i) v.values[i] -= 0.5 * u.r[i] * u.r[i];
  const auto d1 = derivative(v);
  const auto d2 = second_derivative(v);
  TashiroVerdict out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v.r[i];
    // Hess u = u'' dr² + (f'/f) u' f² g_L; against g both blocks must equal 1.
    out.radial_deviation = std::max(out.radial_deviation, std::abs(d2[i]));
    const double spherical = metric.q_minus_one(r) + metric.q(r) * d1[i] / r;
    out.spherical_deviation = std::max(out.spherical_deviation, std::abs(spherical));
  }
  out.exact = out.deviation() < tol;
  return out;
}

std::string format_solution(const PotentialSolution& s) {
  std::string out;
  out += "nodes = " + std::to_string(s.u.size()) + ", log step = " + fmt(s.step) + "\n";
  out += "max |u - r^2/2| = " + fmt(s.max_abs_v) + "\n";
  out += "max equation residual = " + fmt(s.max_equation_residual) + "\n";
  out += "decay exponent = " + (s.exponent ? fmt(*s.exponent) : std::string("undetermined (below floor)")) + "\n";
  return out;
}

void write_columns(const std::string& path, const PotentialSolution& s) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "# r v u\n";
  char buf[96];
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", s.u.r[i], s.v.values[i], s.u.values[i]);
    out << buf;
  }
}

}  // namespace holonomy
