#include "doctest.h"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "ssde/bessel.hpp"
#include "ssde/stats.hpp"

using namespace ssde;

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Independent power-series oracle in long double.
long double series_oracle_i(long double nu, long double z) {
  long double term = std::pow(z / 2, nu) / std::tgamma(nu + 1);
  long double sum = term;
  for (int k = 0; k < 400; ++k) {
    term *= (z / 2) * (z / 2) / ((k + 1) * (k + 1 + nu));
    sum += term;
  }
  return sum;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Integral over (0, inf) with Boost's tanh-sinh rule, independent of the
// library's own Gauss-Kronrod integrator.
template <class F>
double oracle_integral(F f, double upper) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, 0.0, upper, 1e-13);
}

}  // namespace

TEST_CASE("gamma_fn") {
  CHECK(gamma_fn(1.0) == 1.0);
  CHECK(gamma_fn(5.0) == 24.0);
  CHECK(rel_err(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-12);
  CHECK(rel_err(gamma_fn(1.5), 0.5 * std::sqrt(std::numbers::pi)) < 1e-12);
  CHECK(rel_err(gamma_fn(7.5), 1871.2543057977883) < 1e-12);
  for (double x = 0.01; x < 60.0; x *= 1.37) CHECK(rel_err(gamma_fn(x), std::tgamma(x)) < 1e-12);
  CHECK_THROWS_AS(gamma_fn(0.0), InvalidArgument);
  CHECK_THROWS_AS(gamma_fn(-1.5), InvalidArgument);
}

TEST_CASE("bessel_i special values") {
  CHECK(bessel_i(0.0, 0.0) == 1.0);
  CHECK(bessel_i(1.0, 0.0) == 0.0);
  const double i01 = static_cast<double>(series_oracle_i(0.0L, 1.0L));
  CHECK(i01 == doctest::Approx(1.2660658777520082).epsilon(1e-15));
  CHECK(rel_err(bessel_i(0.0, 1.0), i01) < 1e-13);
  // Half-integer orders in closed form.
  for (double z : {0.3, 2.0, 15.0, 35.0}) {
    CHECK(rel_err(bessel_i(-0.5, z), std::sqrt(2.0 / (std::numbers::pi * z)) * std::cosh(z)) < 1e-12);
    CHECK(rel_err(bessel_i(0.5, z), std::sqrt(2.0 / (std::numbers::pi * z)) * std::sinh(z)) < 1e-12);
  }
}

TEST_CASE("bessel_i agrees with an independent implementation to 1e-10") {
  for (double nu : {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5, 2.5}) {
    for (double z = 1e-3; z < 650.0; z *= 1.21) {
      const double ref = boost::math::cyl_bessel_i(nu, z);
      CHECK_MESSAGE(rel_err(bessel_i(nu, z), ref) < 1e-10, "nu=" << nu << " z=" << z);
    }
  }
}

TEST_CASE("series and large-argument branches agree on the overlap band") {
  for (double nu : {-0.75, -0.25, 0.0, 0.5, 1.5}) {
    for (double z = 20.0; z <= 60.0; z += 2.5) {
      const double a = detail::bessel_i_scaled_series(nu, z);
      const double b = detail::bessel_i_scaled_asymptotic(nu, z);
      CHECK_MESSAGE(rel_err(a, b) < 1e-10, "nu=" << nu << " z=" << z);
    }
  }
}

TEST_CASE("bessel_i overflow carries the log value") {
  CHECK_NOTHROW(bessel_i(0.0, 700.0));
  try {
    bessel_i(0.5, 1000.0);
    FAIL("expected overflow");
  } catch (const BesselOverflow& e) {
    const double expected = 1000.0 - 0.5 * std::log(2.0 * std::numbers::pi * 1000.0);
    CHECK(e.log_value() == doctest::Approx(expected).epsilon(1e-10));
  }
  CHECK(std::isfinite(bessel_i_scaled(0.5, 1e6)));
  CHECK_THROWS_AS(bessel_i(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("transition density matches folded and three-dimensional kernels") {
  const BesselParams b1(1.0), b3(3.0);
  for (double x : {0.2, 1.0, 2.5}) {
    for (double y : {0.05, 0.7, 1.0, 3.0}) {
      for (double t : {0.3, 1.0}) {
        const double s = std::sqrt(t);
        const double folded = (phi((y - x) / s) + phi((y + x) / s)) / s;
        CHECK(rel_err(transition_density(b1, t, x, y), folded) < 1e-12);
        const double three_d = (y / x) * (phi((y - x) / s) - phi((y + x) / s)) / s;
        CHECK(rel_err(transition_density(b3, t, x, y), three_d) < 1e-10);
      }
    }
  }
  CHECK(transition_density(b1, 1.0, 1.0, 1.0) ==
        doctest::Approx((1.0 + std::exp(-2.0)) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-13));
  CHECK_THROWS_AS(transition_density(b1, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("boundary density closed forms") {
  CHECK(boundary_density(BesselParams(2.0), 1.0, 1.0) == doctest::Approx(0.6065306597126334).epsilon(1e-14));
  for (double y : {0.1, 1.0, 2.0})
    CHECK(rel_err(boundary_density(BesselParams(1.0), 1.0, y), std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * y * y)) < 1e-13);
}

TEST_CASE("densities integrate to one") {
  for (double beta : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
    const BesselParams p(beta);
    for (double t : {0.5, 1.0}) {
      const double upper = 1.0 + 12.0 * std::sqrt(t);
      const double mass0 = oracle_integral([&](double y) { return boundary_density(p, t, y); }, upper);
      CHECK_MESSAGE(std::abs(mass0 - 1.0) < 1e-8, "beta=" << beta);
      for (double x : {0.3, 1.0}) {
        const double mass = oracle_integral([&](double y) { return transition_density(p, t, x, y); }, x + 12.0 * std::sqrt(t));
        CHECK_MESSAGE(std::abs(mass - 1.0) < 1e-8, "beta=" << beta << " x=" << x);
      }
    }
  }
}

TEST_CASE("transition_cdf") {
  const BesselParams b1(1.0);
  CHECK(transition_cdf(b1, 1.0, 0.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-9));
  CHECK(std::abs(transition_cdf(b1, 1.0, 0.0, 1.0) - 0.6826894921) < 1e-9);
  CHECK(transition_cdf(b1, 1.0, 0.0, 1e-300) < 1e-12);
  CHECK(transition_cdf(b1, 1.0, 0.0, 0.0) == 0.0);
  for (double beta : {0.5, 1.5, 3.0}) {
    const BesselParams p(beta);
    for (double x : {0.0, 1.0}) {
      CHECK(transition_cdf(p, 1.0, x, x + 12.0) >= 1.0 - 1e-8);
      double prev = 0.0;
      for (double y = 0.05; y < 6.0; y += 0.35) {
        const double c = transition_cdf(p, 1.0, x, y);
        CHECK(c >= prev);
        prev = c;
      }
    }
    // From 0, rho(t)^2 / (2t) is Gamma(beta/2).
    for (double y : {0.01, 0.3, 1.0, 2.2})
      CHECK(std::abs(transition_cdf(p, 0.7, 0.0, y) - boost::math::gamma_p(beta / 2.0, y * y / 1.4)) < 1e-9);
  }
}

TEST_CASE("transition_cdf_sorted matches pointwise evaluation") {
  const std::vector<double> ys = {0.001, 0.01, 0.2, 0.2, 0.9, 1.3, 2.0, 4.5, 30.0};
  for (double beta : {0.5, 1.5, 3.0}) {
    const BesselParams p(beta);
    for (double x : {0.0, 0.8}) {
      const auto sorted = transition_cdf_sorted(p, 1.0, x, ys);
      for (std::size_t i = 0; i < ys.size(); ++i) CHECK(std::abs(sorted[i] - transition_cdf(p, 1.0, x, ys[i])) < 1e-9);
    }
  }
}

TEST_CASE("Chapman-Kolmogorov") {
  for (double beta : {0.5, 1.5, 3.0}) {
    const BesselParams p(beta);
    for (auto [x, y, s, t] : {std::array<double, 4>{1.0, 0.7, 0.4, 0.6}, {0.3, 1.5, 1.0, 0.5}, {2.0, 2.2, 0.25, 0.25}}) {
      const double lhs = oracle_integral([&](double z) { return transition_density(p, s, x, z) * transition_density(p, t, z, y); }, 20.0);
      const double rhs = transition_density(p, s + t, x, y);
      CHECK_MESSAGE(rel_err(lhs, rhs) < 1e-6, "beta=" << beta << " x=" << x << " y=" << y);
    }
  }
}

TEST_CASE("boundary density is the x -> 0 limit for beta < 2") {
  for (double beta : {0.5, 1.0, 1.5}) {
    const BesselParams p(beta);
    for (double y : {0.1, 0.8, 2.0}) {
      CHECK_MESSAGE(rel_err(transition_density(p, 1.0, 1e-5, y), boundary_density(p, 1.0, y)) < 1e-6, "beta=" << beta);
    }
  }
}

TEST_CASE("exact sampler from 0 matches the boundary law (beta = 2, 10^6 draws)") {
  const BesselParams p(2.0);
  Stream stream(77, 0);
  std::vector<double> draws(1000000);
  for (auto& d : draws) d = sample_transition(p, 1.0, 0.0, stream);
  std::sort(draws.begin(), draws.end());
  const auto cdf = transition_cdf_sorted(p, 1.0, 0.0, draws);
  // The 99% null quantile of the KS statistic at N = 1e6 is 1.63e-3.
  CHECK(ks_distance_sorted(draws, cdf) < 0.002);
}

TEST_CASE("exact sampler: squared-Bessel mean") {
  const BesselParams p(3.0);
  for (double t : {0.5, 1.0}) {
    Stream stream(11, static_cast<std::uint64_t>(t * 10));
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = sample_transition(p, t, 1.0, stream);
      sum += r * r;
      sum2 += r * r * r * r;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - (1.0 + 3.0 * t)) < 4.0 * se);
  }
}

TEST_CASE("exact sampler: beta < 1 Poisson-gamma branch matches the transition law") {
  const BesselParams p(0.5);
  Stream stream(12, 0);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = sample_transition(p, 1.0, 1.0, stream);
  std::sort(draws.begin(), draws.end());
  const auto cdf = transition_cdf_sorted(p, 1.0, 1.0, draws);
  CHECK(ks_distance_sorted(draws, cdf) < 1.63 / std::sqrt(1e5));
}

TEST_CASE("exact sampler degenerates as t -> 0") {
  const BesselParams p(1.5);
  Stream stream(3, 3);
  double sum = 0.0, sum2 = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const double r = sample_transition(p, 1e-10, 2.0, stream);
    sum += r;
    sum2 += r * r;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(std::sqrt(std::max(0.0, sum2 / n - mean * mean)) < 1e-4);
}

TEST_CASE("sampler is deterministic per noise source") {
  const BesselParams p(0.7);
  CHECK(sample_transition(p, 1.0, 0.4, NoiseSource{5, 5}) == sample_transition(p, 1.0, 0.4, NoiseSource{5, 5}));
}
