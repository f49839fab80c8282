#include "doctest.h"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "ssde/schemes.hpp"
#include "ssde/testfn.hpp"

using namespace ssde;

namespace {

double raw_bump(double x) {
  const double q = (x - 1.0) * (x - 1.0) - 1.0;
  return q < 0.0 ? std::exp(1.0 / q) : 0.0;
}

}  // namespace

TEST_CASE("mollifier") {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double normaliser = 1.0 / ts.integrate(raw_bump, 0.0, 2.0, 1e-15);
  CHECK(mollifier_constant() == doctest::Approx(normaliser).epsilon(1e-13));
  CHECK(mollifier_constant() == doctest::Approx(2.2523).epsilon(1e-4));
  CHECK(mollifier(-1.0) == 0.0);
  CHECK(mollifier(2.0) == 0.0);
  CHECK(mollifier(1e-20) == 0.0);
  CHECK(mollifier(2.0 - 1e-17) == 0.0);
  CHECK(mollifier(1.0) == doctest::Approx(normaliser * std::exp(-1.0)).epsilon(1e-13));
  CHECK(std::abs(ts.integrate([](double x) { return mollifier(x); }, 0.0, 2.0, 1e-15) - 1.0) < 1e-10);
}

TEST_CASE("smooth ramp") {
  boost::math::quadrature::tanh_sinh<double> ts;
  CHECK_THROWS_AS(smooth_ramp(0, 1.0), InvalidArgument);
  for (int n : {1, 3, 10}) {
    const auto below = smooth_ramp(n, -0.5);
    CHECK(below.u == 0.0);
    CHECK(below.du == 0.0);
    CHECK(below.d2u == 0.0);
    CHECK(smooth_ramp(n, 0.0).u == 0.0);
    CHECK(smooth_ramp(n, 2.0 / n).du == 1.0);
    CHECK(smooth_ramp(n, 5.0 / n).du == 1.0);
    CHECK(std::abs(smooth_ramp(n, 3.0 / n).u - smooth_ramp(n, 2.0 / n).u - 1.0 / n) < 1e-10);

    // Oracle: u_n(x) = int_0^x (x - z) n psi(n z) dz, u_n'(x) = int_0^x n psi(n z) dz.
    for (double x : {0.1 / n, 0.5 / n, 1.0 / n, 1.37 / n, 1.9 / n}) {
      const auto r = smooth_ramp(n, x);
      const double u = ts.integrate([&](double z) { return (x - z) * n * mollifier(n * z); }, 0.0, x, 1e-14);
      const double du = ts.integrate([&](double z) { return n * mollifier(n * z); }, 0.0, x, 1e-14);
      CHECK(std::abs(r.u - u) < 1e-12);
      CHECK(std::abs(r.du - du) < 1e-12);
      CHECK(r.d2u == doctest::Approx(n * mollifier(n * x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("ramp derivatives agree with finite differences") {
  for (double x = 0.01; x < 2.0; x += 0.0731) {
    const double e = 1e-5;
    const auto r = smooth_ramp(1, x);
    CHECK((smooth_ramp(1, x + e).u - smooth_ramp(1, x - e).u) / (2 * e) == doctest::Approx(r.du).epsilon(1e-7));
    CHECK((smooth_ramp(1, x + e).du - smooth_ramp(1, x - e).du) / (2 * e) == doctest::Approx(r.d2u).epsilon(1e-6));
  }
}

TEST_CASE("u_n approximates max(x, a)") {
  for (int n : {1, 4, 16, 64}) {
    for (double a : {0.0, 0.3, 1.0}) {
      for (double x = 0.0; x <= 3.0; x += 0.01) CHECK(std::abs(smooth_ramp(n, x - a).u + a - std::max(x, a)) <= 2.0 / n);
    }
  }
}

TEST_CASE("eta_delta") {
  for (double delta : {1.0, 0.1, 0.01}) {
    const auto eta = eta_delta(delta);
    CHECK(eta.value(delta) == doctest::Approx(delta).epsilon(1e-14));
    for (double x = delta / 2; x < 5.0 * delta; x += delta / 7) CHECK(eta.value(x) == doctest::Approx(x).epsilon(1e-14));
    CHECK(eta.d1(delta / 8) == 0.0);
    CHECK(eta.d2(delta / 8) == 0.0);
    CHECK(eta.value(0.0) == doctest::Approx(3.0 * delta / 8.0));
    CHECK(eta.value(delta / 4) == eta.value(0.0));
    CHECK(eta.unbounded());
    double prev = eta.value(0.0);
    for (double x = 0.0; x < delta; x += delta / 500) {
      CHECK(eta.value(x) >= prev);
      prev = eta.value(x);
    }
    eta.check_invariants();
  }
  CHECK_THROWS_AS(eta_delta(0.0), InvalidArgument);
}

TEST_CASE("eta_delta curvature scales like 1/delta") {
  auto peak = [](double delta) {
    const auto eta = eta_delta(delta);
    double m = 0.0;
    for (double x = delta / 4; x <= delta / 2; x += delta / 4000) m = std::max(m, std::abs(eta.d2(x)));
    return m;
  };
  const double k1 = peak(0.1) * 0.1, k2 = peak(0.01) * 0.01;
  CHECK(std::isfinite(k1));
  CHECK(k2 == doctest::Approx(k1).epsilon(1e-3));
}

TEST_CASE("zeta_delta") {
  CHECK(zeta_delta(0.5, 1.0) == 1.0);
  CHECK(zeta_delta(2.0, 1.0) == 2.0);
  for (double delta : {0.1, 0.5}) {
    const auto eta = eta_delta(delta);
    for (double x = 0.0; x <= 3.0; x += 0.01) CHECK(zeta_delta(delta, std::max(eta.value(x), delta)) == doctest::Approx(zeta_delta(delta, x)).epsilon(1e-14));
  }
}

TEST_CASE("bump family") {
  const std::vector<double> radii{0.05, 0.1, 0.2, 0.4, std::numeric_limits<double>::infinity()};
  const auto family = bump_family(radii);
  REQUIRE(family.size() == radii.size());
  for (std::size_t i = 0; i + 1 < family.size(); ++i) {
    const auto& f = family[i];
    const double r = radii[i];
    f.check_invariants();
    CHECK(f.flat_radius() == r);
    CHECK(f.d1(r / 2) == 0.0);
    CHECK(f.d2(r / 2) == 0.0);
    CHECK(f.value(r) == 0.0);
    REQUIRE(f.support_bound());
    CHECK(*f.support_bound() == doctest::Approx(4.0 * r));
    CHECK(f.value(4.0 * r) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.value(10.0 * r) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.d1(4.5 * r) == 0.0);
    for (double x = r + r / 100; x < 3.0 * r; x += r / 100) CHECK(f.d1(x) > 0.0);
    CHECK_FALSE(f.unbounded());
  }
  const auto& constant = family.back();
  CHECK(constant.value(0.3) == 0.0);
  CHECK(constant.d1(0.3) == 0.0);
  CHECK_THROWS_AS(bump_family(std::vector<double>{-1.0}), InvalidArgument);
}

TEST_CASE("ramp family") {
  const std::vector<double> radii{0.1, 0.3};
  const auto family = ramp_family(radii);
  REQUIRE(family.size() == 2);
  for (std::size_t i = 0; i < family.size(); ++i) {
    family[i].check_invariants();
    CHECK(family[i].unbounded());
    CHECK(family[i].d1(radii[i]) == 0.0);
    CHECK(family[i].value(2.0 * radii[i]) == doctest::Approx(2.0 * radii[i]).epsilon(1e-14));
    CHECK(family[i].value(7.0) == doctest::Approx(7.0).epsilon(1e-14));
  }
}

TEST_CASE("Ito residual trivial cases") {
  const auto grid = make_grid(1e-3, 1.0);
  const SdeProblem p(0.5, CoefficientSpec::unit(), Representation::Reflected);
  const auto dw = sample_brownian(grid, NoiseSource{40, 0});
  const auto path = simulate_euler_reflected(p, grid, dw);
  CHECK(ito_residual(path, dw, TestFunction::constant(2.0), p.coefficients) == 0.0);

  const SdeProblem still(0.5, CoefficientSpec::custom([](double) { return 0.0; }, [](double) { return 0.0; }),
                         Representation::Reflected);
  const auto frozen = simulate_euler_reflected(still, grid, dw);
  CHECK(ito_residual(frozen, dw, TestFunction::bump(0.1), still.coefficients) == 0.0);

  CHECK_THROWS_AS(ito_residual(path, std::span(dw).subspan(1), TestFunction::bump(0.1), p.coefficients), InvalidArgument);
}

TEST_CASE("Ito residual vanishes where the Euler step is the definition") {
  // A ramp equal to x turns the residual into the Euler recursion itself.
  const auto grid = make_grid(1e-3, 1.0);
  const SdeProblem p(2.0, CoefficientSpec::bessel(3.0), Representation::DriftIntegral);
  const auto dw = sample_brownian(grid, NoiseSource{41, 0});
  const auto path = simulate_regularized_drift(p, grid, dw, 0.01);
  REQUIRE(*std::min_element(path.values.begin(), path.values.end()) > 0.2);
  CHECK(ito_residual(path, dw, TestFunction::ramp(0.1), p.coefficients) < 1e-12);
}

TEST_CASE("Ito residual shrinks under refinement") {
  const SdeProblem p(0.5, CoefficientSpec::bessel(1.5), Representation::Reflected);
  const auto f = TestFunction::bump(0.2);
  std::vector<double> medians;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const auto grid = make_grid(h, 1.0);
    std::vector<double> r;
    for (std::size_t i = 0; i < 64; ++i) {
      const auto dw = sample_brownian(grid, NoiseSource{42, i});
      r.push_back(ito_residual(simulate_euler_reflected(p, grid, dw), dw, f, p.coefficients));
    }
    std::nth_element(r.begin(), r.begin() + 32, r.end());
    medians.push_back(r[32] / std::sqrt(h));
  }
  // Fitted constant C in median <= C sqrt(h).
  const double c = *std::max_element(medians.begin(), medians.end());
  CHECK(c < 10.0);
  CHECK(medians[2] * std::sqrt(1e-4) < medians[1] * std::sqrt(1e-3));
  CHECK(medians[1] * std::sqrt(1e-3) < medians[0] * std::sqrt(1e-2));
}

TEST_CASE("martingale statistic guards") {
  const auto grid = make_grid(1e-2, 1.0);
  std::vector<Path> few;
  for (std::size_t i = 0; i < 10; ++i) few.push_back(simulate_bessel_exact(1.5, 0.5, grid, NoiseSource{43, i}));
  CHECK_THROWS_AS(martingale_increment_stat(few, TestFunction::bump(0.1), CoefficientSpec::bessel(1.5), 0.25, 1.0),
                  InsufficientSample);

  std::vector<Path> paths;
  for (std::size_t i = 0; i < 100; ++i) paths.push_back(simulate_bessel_exact(1.5, 0.5, grid, NoiseSource{43, i}));
  const auto stat = martingale_increment_stat(paths, TestFunction::constant(1.0), CoefficientSpec::bessel(1.5), 0.25, 1.0);
  CHECK(stat.z == 0.0);
  CHECK(stat.max_abs() == 0.0);
  CHECK(stat.count == 100);
  CHECK_THROWS_AS(martingale_increment_stat(paths, TestFunction::bump(0.1), CoefficientSpec::bessel(1.5), 1.0, 0.25),
                  InvalidArgument);
}

TEST_CASE("streaming and stored statistics agree") {
  const auto grid = make_grid(1e-2, 1.0);
  const auto coeffs = CoefficientSpec::bessel(0.5);
  auto make = [&](std::size_t i) { return simulate_bessel_exact(0.5, 0.5, grid, NoiseSource{44, i}); };
  std::vector<Path> paths;
  for (std::size_t i = 0; i < 200; ++i) paths.push_back(make(i));
  const auto family = bump_family(std::vector<double>{0.05, 0.2});
  const auto streamed = martingale_increment_stats(200, make, family, coeffs, 0.25, 1.0);
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto stored = martingale_increment_stat(paths, family[j], coeffs, 0.25, 1.0);
    CHECK(streamed[j].z == stored.z);
    CHECK(streamed[j].z_conditional == stored.z_conditional);
  }
}

TEST_CASE("exact Bessel paths pass the martingale check") {
  const auto grid = make_grid(1e-3, 1.0);
  const auto coeffs = CoefficientSpec::bessel(0.5);
  const auto family = bump_family(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
  const auto stats = martingale_increment_stats(
      20000, [&](std::size_t i) { return simulate_bessel_exact(0.5, 0.5, grid, NoiseSource{45, i}); }, family, coeffs,
      0.25, 1.0);
  for (const auto& s : stats) CHECK(s.max_abs() < 4.0);
}

TEST_CASE("absorbed power diffusion is not rejected by the martingale check alone") {
  // Absorption at 0 leaves f(x) - int Lf a martingale for f flat near 0, so
  // this solution is told apart by the zero-time condition instead.
  const auto grid = make_grid(1e-3, 1.0);
  const auto coeffs = CoefficientSpec::power(0.25);
  const auto family = bump_family(std::vector<double>{0.05});
  const auto stats = martingale_increment_stats(
      2000,
      [&](std::size_t i) { return simulate_power_diffusion(0.25, 0.1, grid, NoiseSource{46, i}, PowerVariant::Absorbed); },
      family, coeffs, 0.25, 1.0);
  CHECK(stats[0].max_abs() < 4.0);
}
