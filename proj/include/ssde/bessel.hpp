// Closed-form transition laws of the Bessel process of dimension beta, the
// special functions they need, and an exact transition sampler.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ssde/core.hpp"
#include "ssde/random.hpp"

namespace ssde {

/// I_nu(z) exceeds the double range; log_value carries log I_nu(z).
class BesselOverflow : public std::overflow_error {
 public:
  explicit BesselOverflow(double log_value)
      : std::overflow_error("bessel_i overflows; log value " + std::to_string(log_value)), log_value_(log_value) {}
  double log_value() const noexcept { return log_value_; }

 private:
  double log_value_;
};

/// Gamma function for x > 0 (Lanczos, g = 7).
double gamma_fn(double x);

/// Modified Bessel function of the first kind, nu > -1, z >= 0.
double bessel_i(double nu, double z);

/// exp(-z) * I_nu(z); never overflows.
double bessel_i_scaled(double nu, double z);

/// z at and above which bessel_i switches from the power series to the
/// large-argument expansion (when also z >= nu^2).
inline constexpr double kBesselAsymptoticSwitch = 20.0;

namespace detail {
double bessel_i_scaled_series(double nu, double z);
double bessel_i_scaled_asymptotic(double nu, double z);
}  // namespace detail

struct BesselParams {
  double beta;
  double nu;  ///< beta / 2 - 1
  explicit BesselParams(double beta);
};

/// p_t(x, y) for x > 0. Throws InvalidArgument for x == 0 (use
/// boundary_density).
double transition_density(const BesselParams& p, double t, double x, double y);

/// p_t(0, y).
double boundary_density(const BesselParams& p, double t, double y);

/// P(rho(t) <= y | rho(0) = x) by adaptive quadrature of the density
/// (absolute tolerance 1e-10, upper limit x + 12 sqrt(t)).
double transition_cdf(const BesselParams& p, double t, double x, double y);

/// CDF at each point of an ascending sequence, integrating only the gaps
/// between consecutive points. Equivalent to calling transition_cdf per point.
std::vector<double> transition_cdf_sorted(const BesselParams& p, double t, double x, std::span<const double> ascending);

/// One draw of rho(t) given rho(0) = x, through the squared-Bessel law:
/// (x + sqrt(t) Z)^2 + t chi^2_{beta-1} for beta >= 1, and a Poisson mixture of
/// gamma variables for beta < 1.
double sample_transition(const BesselParams& p, double t, double x, Stream& stream);
double sample_transition(const BesselParams& p, double t, double x, const NoiseSource& noise);

}  // namespace ssde
