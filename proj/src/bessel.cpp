#include "ssde/bessel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssde/quadrature.hpp"

namespace ssde {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kCdfTolerance = 1e-10;

double lanczos_gamma(double x) {
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  x -= 1.0;
  double a = kLanczos[0];
  const double t = x + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double log_gamma_positive(double x) {
  if (x < 100.0) return std::log(lanczos_gamma(x));
  return std::lgamma(x);
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw InvalidArgument("gamma_fn: argument must be positive");
  // Exact on small integers, where the approximation is off in the last ulps.
  if (x <= 20.0 && x == std::floor(x)) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  return lanczos_gamma(x);
}

namespace detail {

double bessel_i_scaled_series(double nu, double z) {
  const double half = 0.5 * z;
  double term = std::exp(nu * std::log(half) - log_gamma_positive(nu + 1.0) - z);
  double sum = term;
  const double q = half * half;
  for (int k = 0; k < 1000; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (term < sum * 1e-17 && static_cast<double>(k) > half) break;
  }
  return sum;
}

double bessel_i_scaled_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    if (std::abs(term) >= prev) break;  // the expansion has started to diverge
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace detail

double bessel_i_scaled(double nu, double z) {
  if (!(nu > -1.0)) throw InvalidArgument("bessel_i: order must exceed -1");
  if (!(z >= 0.0)) throw InvalidArgument("bessel_i: argument must be nonnegative");
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (z >= kBesselAsymptoticSwitch && z >= nu * nu) return detail::bessel_i_scaled_asymptotic(nu, z);
  return detail::bessel_i_scaled_series(nu, z);
}

double bessel_i(double nu, double z) {
  const double scaled = bessel_i_scaled(nu, z);
  if (z > 700.0) {
    const double log_value = z + std::log(scaled);
    if (log_value > std::log(std::numeric_limits<double>::max())) throw BesselOverflow(log_value);
  }
  return scaled * std::exp(z);
}

BesselParams::BesselParams(double beta_) : beta(beta_), nu(0.5 * beta_ - 1.0) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("Bessel dimension must be positive");
}

double transition_density(const BesselParams& p, double t, double x, double y) {
  if (!(t > 0.0)) throw InvalidArgument("transition_density: t must be positive");
  if (x == 0.0) throw InvalidArgument("transition_density: x = 0 needs boundary_density");
  if (!(x > 0.0)) throw InvalidArgument("transition_density: x must be positive");
  if (!(y > 0.0)) return 0.0;
  const double z = x * y / t;
  const double scaled = bessel_i_scaled(p.nu, z);
  if (scaled == 0.0) return 0.0;
  const double d = x - y;
  const double log_p = -std::log(t) + p.nu * (std::log(y) - std::log(x)) + std::log(y) - d * d / (2.0 * t) + std::log(scaled);
  return std::exp(log_p);
}

double boundary_density(const BesselParams& p, double t, double y) {
  if (!(t > 0.0)) throw InvalidArgument("boundary_density: t must be positive");
  if (!(y > 0.0)) return 0.0;
  const double log_p = -p.nu * std::numbers::ln2 - (p.nu + 1.0) * std::log(t) - log_gamma_positive(p.nu + 1.0) +
                       (2.0 * p.nu + 1.0) * std::log(y) - y * y / (2.0 * t);
  return std::exp(log_p);
}

namespace {

// Density after the substitution y = u^(1/m); for m = beta the y^(beta-1)
// behaviour at the origin becomes a finite limit.
struct SubstitutedDensity {
  const BesselParams& p;
  double t, x, m;
  double operator()(double u) const {
    const double y = std::pow(u, 1.0 / m);
    const double dens = x == 0.0 ? boundary_density(p, t, y) : transition_density(p, t, x, y);
    return dens * y / (m * u);
  }
};

double substitution_power(const BesselParams& p) { return p.beta < 2.0 ? p.beta : 1.0; }

}  // namespace

double transition_cdf(const BesselParams& p, double t, double x, double y) {
  if (!(t > 0.0)) throw InvalidArgument("transition_cdf: t must be positive");
  if (!(x >= 0.0)) throw InvalidArgument("transition_cdf: x must be nonnegative");
  if (!(y > 0.0)) return 0.0;
  const double upper = std::min(y, x + 12.0 * std::sqrt(t));
  const double m = substitution_power(p);
  const SubstitutedDensity g{p, t, x, m};
  const double value = integrate(g, 0.0, std::pow(upper, m), kCdfTolerance).value;
  return std::clamp(value, 0.0, 1.0);
}

std::vector<double> transition_cdf_sorted(const BesselParams& p, double t, double x, std::span<const double> ys) {
  if (!(t > 0.0)) throw InvalidArgument("transition_cdf_sorted: t must be positive");
  const double cap = x + 12.0 * std::sqrt(t);
  const double m = substitution_power(p);
  const SubstitutedDensity g{p, t, x, m};
  std::vector<double> out(ys.size());
  double prev_u = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (i > 0 && ys[i] < ys[i - 1]) throw InvalidArgument("transition_cdf_sorted: input not ascending");
    if (!(ys[i] > 0.0)) {
      out[i] = 0.0;
      continue;
    }
    const double u = std::pow(std::min(ys[i], cap), m);
    if (u > prev_u) {
      acc += integrate(g, prev_u, u, 1e-13, 1e-12).value;
      prev_u = u;
    }
    out[i] = std::clamp(acc, 0.0, 1.0);
  }
  return out;
}

double sample_transition(const BesselParams& p, double t, double x, Stream& stream) {
  if (!(t > 0.0)) throw InvalidArgument("sample_transition: t must be positive");
  if (!(x >= 0.0)) throw InvalidArgument("sample_transition: x must be nonnegative");
  double squared;
  if (x == 0.0) {
    squared = 2.0 * t * stream.gamma(0.5 * p.beta);
  } else if (p.beta >= 1.0) {
    const double shifted = x + std::sqrt(t) * stream.normal();
    squared = shifted * shifted;
    if (p.beta > 1.0) squared += 2.0 * t * stream.gamma(0.5 * (p.beta - 1.0));
  } else {
    const auto n = stream.poisson(x * x / (2.0 * t));
    squared = 2.0 * t * stream.gamma(0.5 * p.beta + static_cast<double>(n));
  }
  return std::sqrt(squared);
}

double sample_transition(const BesselParams& p, double t, double x, const NoiseSource& noise) {
  Stream stream = noise.stream();
  return sample_transition(p, t, x, stream);
}

}  // namespace ssde
