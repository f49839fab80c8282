// Path integrators, one per integral representation.
//
// Every scheme has two entry points: one drawing its own Brownian increments
// from a NoiseSource, and one taking the increments explicitly so that
// refinement studies can drive several grids with one Brownian path.
#pragma once

#include <optional>
#include <span>
#include <string>

#include "ssde/core.hpp"
#include "ssde/random.hpp"

namespace ssde {

/// Projected Euler step for the reflected (Skorokhod) representation:
///   x_{k+1} = max(0, x_k + a(x_k v f) h + sigma(x_k v f) dW_k),
/// with the clipped amount accumulated into the reflection term. The
/// evaluation floor f defaults to sqrt(h).
Path simulate_euler_reflected(const SdeProblem& problem, const TimeGrid& grid, const NoiseSource& noise,
                              std::optional<double> floor = std::nullopt);
Path simulate_euler_reflected(const SdeProblem& problem, const TimeGrid& grid, std::span<const double> increments,
                              std::optional<double> floor = std::nullopt);

/// Euler step with both coefficients evaluated at max(x, delta), projected to
/// [0, inf). For the drift-integral and principal-value representations.
Path simulate_regularized_drift(const SdeProblem& problem, const TimeGrid& grid, const NoiseSource& noise, double delta);
Path simulate_regularized_drift(const SdeProblem& problem, const TimeGrid& grid, std::span<const double> increments,
                                double delta);

/// Markov chain of exact Bessel transitions: marginals are exact at grid times.
Path simulate_bessel_exact(double beta, double x0, const TimeGrid& grid, const NoiseSource& noise);
Path simulate_bessel_exact(double beta, double x0, const TimeGrid& grid, Stream& stream);

enum class PowerVariant {
  StickyFree,  ///< instantaneous reflection at 0, zero time spent there
  Absorbed,    ///< stays at 0 after the first visit
};

/// dx = x^alpha dW on [0, inf). The sticky-free variant evaluates the
/// diffusion at max(x, sqrt(h)) and reflects by projection; the absorbed
/// variant freezes at 0.
Path simulate_power_diffusion(double alpha, double x0, const TimeGrid& grid, const NoiseSource& noise, PowerVariant variant);
Path simulate_power_diffusion(double alpha, double x0, const TimeGrid& grid, std::span<const double> increments,
                              PowerVariant variant);

/// Scheme selector used by the uniqueness experiments and the CLI.
enum class Scheme { EulerReflected, RegularizedDrift, BesselExact, PowerStickyFree, PowerAbsorbed };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// True when the scheme consumes Brownian increments (and so can share them).
bool scheme_uses_increments(Scheme s);

struct SchemeOptions {
  std::optional<double> delta;  ///< regularization / evaluation floor; default sqrt(h)
};

/// Runs `scheme` on `problem`. Bessel and power schemes read beta/alpha from
/// the problem's coefficients.
Path simulate(const SdeProblem& problem, Scheme scheme, const TimeGrid& grid, const NoiseSource& noise,
              const SchemeOptions& options = {});
Path simulate(const SdeProblem& problem, Scheme scheme, const TimeGrid& grid, std::span<const double> increments,
              const SchemeOptions& options = {});

}  // namespace ssde
