#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "holonomy/errors.hpp"
#include "holonomy/io.hpp"
#include "holonomy/radial.hpp"

using namespace holonomy;

namespace {

// Both roots of λ² + (n − 2)λ − μ = 0 from the textbook formula.
std::pair<double, double> quadratic_roots(int n, double mu) {
  const double b = n - 2.0;
  const double disc = std::sqrt(b * b + 4.0 * mu);
  return {(-b + disc) / 2.0, (-b - disc) / 2.0};
}

double power_integral(double e, double a, double b) {
  return e == -1.0 ? std::log(b / a) : (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

}  // namespace

TEST_CASE("critical rates match the quadratic formula") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> mu(0.0, 50.0);
  for (int n : {4, 6, 7, 9}) {
    std::vector<double> spectrum;
    for (int i = 0; i < 8; ++i) spectrum.push_back(mu(rng));
    const auto set = critical_rates(spectrum, n, -100.0, 100.0);
    CHECK(set.rates.size() == 16);
    for (double m : spectrum) {
      const auto [up, down] = quadratic_roots(n, m);
      int found = 0;
      for (const auto& r : set.rates)
        if (std::abs(r.lambda - up) < 1e-12 || std::abs(r.lambda - down) < 1e-12) ++found;
      CHECK(found == 2);
    }
    for (std::size_t i = 1; i < set.rates.size(); ++i) CHECK(set.rates[i - 1].lambda > set.rates[i].lambda);
  }
}

TEST_CASE("sphere spectra give integer rates") {
  for (int n : {6, 7}) {
    const auto spectrum = sphere_spectrum(n - 1, 12);
    for (int k = 0; k <= 12; ++k) CHECK(spectrum[k].mu == k * (k + n - 2));
    const auto set = critical_rates(spectrum, n, -40.0, 40.0);
    std::set<int> got;
    for (const auto& r : set.rates) {
      CHECK(r.lambda == std::round(r.lambda));
      got.insert(static_cast<int>(std::lround(r.lambda)));
    }
    std::set<int> want;
    for (int k = 0; k <= 12; ++k) {
      want.insert(k);
      want.insert(2 - n - k);
    }
    CHECK(got == want);
  }
}

TEST_CASE("sphere multiplicities") {
  const auto s2 = sphere_spectrum(2, 6);
  for (int k = 0; k <= 6; ++k) CHECK(s2[k].multiplicity == 2 * k + 1);
  const auto s6 = sphere_spectrum(6, 4);
  CHECK(s6[1].multiplicity == 7);
  CHECK(s6[2].multiplicity == 27);
  CHECK(s6[3].multiplicity == 77);
  const auto s1 = sphere_spectrum(1, 3);
  CHECK(s1[0].multiplicity == 1);
  CHECK(s1[2].multiplicity == 2);
  CHECK_THROWS_AS(sphere_spectrum(0, 3), DimensionMismatch);
}

TEST_CASE("no critical rates strictly between 2-n and 0") {
  std::mt19937 rng(1000);
  std::exponential_distribution<double> mu(0.05);
  std::uniform_int_distribution<int> dim(3, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng);
    std::vector<double> spectrum{0.0, mu(rng), mu(rng) * 1e-8, mu(rng) * 1e6};
    const auto set = critical_rates(spectrum, n, 2.0 - n, 0.0);
    for (const auto& r : set.rates) CHECK((r.lambda == 0.0 || r.lambda == 2.0 - n));
  }
  CHECK_THROWS_AS(critical_rates(std::vector<double>{-1.0}, 7, -5.0, 0.0), ValidationError);
}

TEST_CASE("format_rates") {
  const auto set = critical_rates(sphere_spectrum(6, 2), 7, -6.0, 1.0);
  const auto text = format_rates(set);
  CHECK(text.find("excluded window (-5, 0): empty") != std::string::npos);
}

TEST_CASE("weighted norms of power laws against closed forms") {
  const int n = 7;
  const auto metric = WarpedMetric::euclidean(n, 1.0, 100.0);
  const auto grid = log_grid(1.0, 100.0, 20001);
  for (double a : {-5.0, -2.5, 0.5}) {
    const auto u = sample_field(grid, [a](double r) { return std::pow(r, a); });
    for (double p : {1.0, 2.0, 3.0})
      for (double lambda : {-n / 2.0, -1.0, 2.0}) {
        const double base = power_integral(p * (a - lambda) - 1.0, 1.0, 100.0);
        const double hess = std::sqrt(a * a * (a - 1) * (a - 1) + (n - 1) * a * a);
        CHECK(weighted_norm(u, 0, lambda, p, metric) == doctest::Approx(std::pow(base, 1 / p)).epsilon(1e-6));
        CHECK(weighted_norm(u, 1, lambda, p, metric) ==
              doctest::Approx(std::pow((1 + std::pow(std::abs(a), p)) * base, 1 / p)).epsilon(1e-4));
        CHECK(weighted_norm(u, 2, lambda, p, metric) ==
              doctest::Approx(std::pow((1 + std::pow(std::abs(a), p) + std::pow(hess, p)) * base, 1 / p)).epsilon(1e-4));
      }
  }
}

TEST_CASE("lambda = -n/2, p = 2 is the plain L2 norm") {
  const int n = 6;
  auto metric = WarpedMetric::euclidean(n, 1.0, 50.0);
  metric.set_link_volume(3.0);
  const auto grid = log_grid(1.0, 50.0, 20001);
  const auto u = sample_field(grid, [](double r) { return std::exp(-r) * r; });
  // ∫ u² r^{n-1} dr · V_L by a much finer trapezoid rule in r.
  double exact = 0.0;
  const int M = 400000;
  for (int i = 0; i < M; ++i) {
    const double r0 = 1.0 + 49.0 * i / M, r1 = 1.0 + 49.0 * (i + 1) / M;
    const auto g = [](double r) { return std::exp(-2 * r) * r * r * std::pow(r, 5); };
    exact += 0.5 * (g(r0) + g(r1)) * (r1 - r0);
  }
  CHECK(weighted_norm(u, 0, -n / 2.0, 2.0, metric) == doctest::Approx(std::sqrt(3.0 * exact)).epsilon(1e-6));
}

TEST_CASE("power-law finiteness") {
  CHECK(power_law_norm_finite(-3.0, -2.0, 2.0));
  CHECK_FALSE(power_law_norm_finite(-2.0, -2.0, 2.0));
  CHECK_FALSE(power_law_norm_finite(1.0, 0.5, 1.0));
}

TEST_CASE("norm input validation") {
  const auto metric = WarpedMetric::euclidean(7, 1.0, 10.0);
  const auto u = sample_field(log_grid(1.0, 10.0, 50), [](double r) { return r; });
  CHECK_THROWS_AS(weighted_norm(u, 3, 0.0, 2.0, metric), ValidationError);
  CHECK_THROWS_AS(weighted_norm(u, 0, 0.0, 0.0, metric), ValidationError);
  const auto outside = sample_field(log_grid(0.5, 10.0, 50), [](double r) { return r; });
  CHECK_THROWS_AS(weighted_norm(outside, 0, 0.0, 2.0, metric), ValidationError);
  CHECK_THROWS_AS(log_grid(2.0, 1.0, 10), ValidationError);
  CHECK_THROWS_AS((RadialField{{1.0, 2.0, 2.0}, {0.0, 0.0, 0.0}}.validate()), ValidationError);
}

TEST_CASE("Laplacian of r^2/2") {
  for (int n : {6, 7}) {
    const auto metric = WarpedMetric::euclidean(n, 1.0, 1000.0);
    const auto grid = log_grid(1.0, 1000.0, 10000);
    const auto closed = cone_laplacian(
        grid, [](double r) { return r; }, [](double) { return 1.0; }, metric);
    for (double v : closed.values) CHECK(v == doctest::Approx(-n).epsilon(1e-14));
    const auto fd = cone_laplacian(sample_field(grid, [](double r) { return r * r / 2; }), metric);
    for (std::size_t i = 1; i + 1 < fd.size(); ++i) CHECK(fd.values[i] == doctest::Approx(-n).epsilon(1e-6));
    for (double v : laplacian_r2_defect(grid, metric).values) CHECK(v == 0.0);
  }
}

TEST_CASE("residual decay of Delta r^2 + 2n") {
  for (auto [n, nu, c] : {std::tuple{7, -4.0, 0.1}, {6, -3.0, 0.1}, {7, -2.5, -0.3}}) {
    const auto metric = WarpedMetric::perturbed_cone(n, c, nu, 1.0, 1000.0);
    const auto grid = log_grid(1.0, 1000.0, 10000);
    const auto defect = laplacian_r2_defect(grid, metric);
    const auto fit = fit_decay_exponent(defect);
    REQUIRE(fit);
    CHECK(*fit == doctest::Approx(nu).epsilon(0.01));
    // Against the closed-form cone Laplacian of r², which does not use the defect formula.
    const auto lap = cone_laplacian(
        grid, [](double r) { return 2 * r; }, [](double) { return 2.0; }, metric);
    for (std::size_t i = 0; i < grid.size(); i += 997)
      CHECK(std::abs(lap.values[i] + 2 * n - defect.values[i]) < 1e-12);
  }
}

TEST_CASE("fit_decay_exponent on exact power laws") {
  const auto grid = log_grid(1.0, 1e3, 500);
  CHECK(*fit_decay_exponent(sample_field(grid, [](double r) { return 5 * std::pow(r, -1.7); })) ==
        doctest::Approx(-1.7).epsilon(1e-12));
  CHECK_FALSE(fit_decay_exponent(sample_field(grid, [](double) { return 0.0; })));
}

TEST_CASE("Euclidean potential is exactly r^2/2") {
  for (int n : {6, 7}) {
    const auto s = solve_potential(WarpedMetric::euclidean(n, 1.0, 1000.0));
    CHECK(s.u.size() == 10000);
    CHECK(s.max_abs_v < 1e-10);
    CHECK_FALSE(s.exponent);
    const auto t = tashiro_check(s.u, WarpedMetric::euclidean(n, 1.0, 1000.0));
    CHECK(t.exact);
    CHECK(t.deviation() == 0.0);
  }
}

TEST_CASE("perturbed-cone potentials decay like r^(2+nu)") {
  for (auto [n, nu, c] : {std::tuple{7, -4.0, 0.1}, {6, -3.0, 0.1}, {6, -4.0, 0.1}, {7, -4.0, -0.4}, {6, -3.0, -0.5}}) {
    CAPTURE(n);
    CAPTURE(nu);
    CAPTURE(c);
    const auto metric = WarpedMetric::perturbed_cone(n, c, nu, 1.0, 1000.0);
    const auto s = solve_potential(metric);
    REQUIRE(s.exponent);
    CHECK(std::abs(*s.exponent - (2 + nu)) < 0.15);
    CHECK(s.max_equation_residual < 1e-3);
    const auto t = tashiro_check(s.u, metric);
    CHECK_FALSE(t.exact);
    CHECK(t.deviation() > 1e-4);
  }
}

TEST_CASE("potential solver convergence and inner condition") {
  const auto metric = WarpedMetric::perturbed_cone(7, 0.1, -4.0, 1.0, 1000.0);
  PotentialOptions coarse, fine, dirichlet;
  coarse.nodes = 10000;
  fine.nodes = 20000;
  dirichlet.inner = PotentialOptions::Inner::Dirichlet;
  const double a = *solve_potential(metric, coarse).exponent;
  const double b = *solve_potential(metric, fine).exponent;
  const double d = *solve_potential(metric, dirichlet).exponent;
  CHECK(std::abs(a - b) < 0.02);
  CHECK(std::abs(a - d) < 0.05);
}

TEST_CASE("potential solver rejects slow rates") {
  CHECK_THROWS_AS(solve_potential(WarpedMetric::perturbed_cone(7, 0.1, -1.5, 1.0, 1000.0)), RateOutOfRange);
  CHECK_THROWS_AS(WarpedMetric::perturbed_cone(7, 0.1, 0.5, 1.0, 1000.0), RateOutOfRange);
  CHECK_THROWS_AS(WarpedMetric::perturbed_cone(7, -2.0, -4.0, 1.0, 1000.0), ValidationError);
}

TEST_CASE("tabulated profiles interpolate monotonically") {
  std::vector<double> r, f;
  for (double x : log_grid(1.0, 1000.0, 400)) {
    r.push_back(x);
    f.push_back(x * (1 + 0.1 * std::pow(x, -4.0)));
  }
  const auto table = WarpedMetric::tabulated(7, r, f, -4.0);
  const auto exact = WarpedMetric::perturbed_cone(7, 0.1, -4.0, 1.0, 1000.0);
  for (double x : {1.3, 7.7, 42.0, 555.0}) {
    CHECK(table.f(x) == doctest::Approx(exact.f(x)).epsilon(1e-6));
    CHECK(table.f_prime(x) == doctest::Approx(exact.f_prime(x)).epsilon(1e-3));
  }
  CHECK_THROWS_AS(WarpedMetric::tabulated(7, {1, 2, 3, 4}, {1, 2, -1, 4}), ValidationError);
  CHECK_THROWS_AS(WarpedMetric::tabulated(7, {1, 2, 3}, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(WarpedMetric::tabulated(7, {1, 2, 3, 4}, {1, 2, 3, 4}, 0.5), RateOutOfRange);
}

TEST_CASE("profile and spectrum records") {
  const auto rec = parse_profile(read_text_file("data/perturbed_cone_n7.profile"));
  CHECK(rec.name == "perturbed_n7");
  CHECK(rec.nodes == 10000);
  CHECK(rec.metric.kind() == WarpedMetric::Kind::PerturbedCone);
  CHECK(rec.metric.dim() == 7);
  CHECK(*rec.metric.rate() == -4.0);
  CHECK(rec.metric.c() == 0.1);

  const auto spectrum = parse_spectrum(read_text_file("data/sphere6.spectrum"));
  const auto reference = sphere_spectrum(6, 4);
  REQUIRE(spectrum.size() == reference.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    CHECK(spectrum[i].mu == reference[i].mu);
    CHECK(spectrum[i].multiplicity == reference[i].multiplicity);
  }
  CHECK_THROWS_AS(parse_spectrum("0 1\nsix 7\n"), ParseError);
  CHECK_THROWS_AS(parse_profile("kind perturbed_cone\nn 7\nc 0.1\n"), ValidationError);
  CHECK_THROWS_AS(parse_profile("kind torus\n"), ParseError);
}
