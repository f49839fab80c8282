#include "ssde/schemes.hpp"

#include <algorithm>
#include <cmath>

#include "ssde/bessel.hpp"

namespace ssde {

namespace {

void require_increments(const TimeGrid& grid, std::span<const double> dw) {
  if (dw.size() != grid.n_steps())
    throw InvalidArgument("expected " + std::to_string(grid.n_steps()) + " increments, got " + std::to_string(dw.size()));
}

double default_floor(const TimeGrid& grid) { return std::sqrt(grid.step()); }

// Projected Euler loop shared by the reflected and regularized schemes.
template <class Coeffs>
void projected_euler(const Coeffs& c, double x0, double h, std::span<const double> dw, double floor,
                     std::vector<double>& x, std::vector<double>* reflection) {
  x[0] = x0;
  double l = 0.0;
  if (reflection) (*reflection)[0] = 0.0;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    const double xe = std::max(x[k], floor);
    const double a = c.drift(xe);
    const double s = c.diffusion(xe);
    const double next = x[k] + a * h + s * dw[k];
    if (!std::isfinite(next)) throw SchemeError("coefficient evaluation produced a non-finite value at x=" + std::to_string(xe), k);
    if (next < 0.0) {
      l -= next;
      x[k + 1] = 0.0;
    } else {
      x[k + 1] = next;
    }
    if (reflection) (*reflection)[k + 1] = l;
  }
}

}  // namespace

Path simulate_euler_reflected(const SdeProblem& problem, const TimeGrid& grid, std::span<const double> dw,
                              std::optional<double> floor) {
  if (problem.representation != Representation::Reflected)
    throw InvalidArgument("simulate_euler_reflected needs the reflected representation");
  require_increments(grid, dw);
  const double f = floor.value_or(default_floor(grid));
  if (!(f >= 0.0)) throw InvalidArgument("evaluation floor must be nonnegative");
  Path path{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  problem.coefficients.visit(
      [&](const auto& c) { projected_euler(c, problem.x0, grid.step(), dw, f, path.values, &*path.reflection); });
  return path;
}

Path simulate_euler_reflected(const SdeProblem& problem, const TimeGrid& grid, const NoiseSource& noise,
                              std::optional<double> floor) {
  const auto dw = sample_brownian(grid, noise);
  return simulate_euler_reflected(problem, grid, dw, floor);
}

Path simulate_regularized_drift(const SdeProblem& problem, const TimeGrid& grid, std::span<const double> dw, double delta) {
  if (problem.representation != Representation::DriftIntegral && problem.representation != Representation::PrincipalValue)
    throw InvalidArgument("simulate_regularized_drift needs the drift-integral or principal-value representation");
  if (!(delta > 0.0)) throw InvalidArgument("regularization delta must be positive");
  require_increments(grid, dw);
  Path path{grid, std::vector<double>(grid.size()), std::nullopt};
  problem.coefficients.visit(
      [&](const auto& c) { projected_euler(c, problem.x0, grid.step(), dw, delta, path.values, nullptr); });
  return path;
}

Path simulate_regularized_drift(const SdeProblem& problem, const TimeGrid& grid, const NoiseSource& noise, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("regularization delta must be positive");
  const auto dw = sample_brownian(grid, noise);
  return simulate_regularized_drift(problem, grid, dw, delta);
}

Path simulate_bessel_exact(double beta, double x0, const TimeGrid& grid, Stream& stream) {
  const BesselParams params(beta);
  if (!(x0 >= 0.0)) throw InvalidArgument("initial point must be nonnegative");
  Path path{grid, std::vector<double>(grid.size()), std::nullopt};
  path.values[0] = x0;
  for (std::size_t k = 0; k < grid.n_steps(); ++k)
    path.values[k + 1] = sample_transition(params, grid.step(), path.values[k], stream);
  return path;
}

Path simulate_bessel_exact(double beta, double x0, const TimeGrid& grid, const NoiseSource& noise) {
  Stream stream = noise.stream();
  return simulate_bessel_exact(beta, x0, grid, stream);
}

Path simulate_power_diffusion(double alpha, double x0, const TimeGrid& grid, std::span<const double> dw, PowerVariant variant) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidArgument("power-diffusion exponent must lie in (0, 1/2)");
  if (!(x0 >= 0.0)) throw InvalidArgument("initial point must be nonnegative");
  require_increments(grid, dw);
  const PowerDiffusion c{alpha};
  if (variant == PowerVariant::StickyFree) {
    Path path{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    projected_euler(c, x0, grid.step(), dw, default_floor(grid), path.values, &*path.reflection);
    return path;
  }
  Path path{grid, std::vector<double>(grid.size()), std::nullopt};
  path.values[0] = x0;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    const double x = path.values[k];
    path.values[k + 1] = x == 0.0 ? 0.0 : std::max(0.0, x + c.diffusion(x) * dw[k]);
  }
  return path;
}

Path simulate_power_diffusion(double alpha, double x0, const TimeGrid& grid, const NoiseSource& noise, PowerVariant variant) {
  const auto dw = sample_brownian(grid, noise);
  return simulate_power_diffusion(alpha, x0, grid, dw, variant);
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::EulerReflected: return "euler_reflected";
    case Scheme::RegularizedDrift: return "regularized";
    case Scheme::BesselExact: return "bessel_exact";
    case Scheme::PowerStickyFree: return "power_sticky";
    case Scheme::PowerAbsorbed: return "power_absorbed";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  for (Scheme s : {Scheme::EulerReflected, Scheme::RegularizedDrift, Scheme::BesselExact, Scheme::PowerStickyFree,
                   Scheme::PowerAbsorbed}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown scheme '" + name + "'");
}

bool scheme_uses_increments(Scheme s) { return s != Scheme::BesselExact; }

namespace {

double bessel_beta(const SdeProblem& p) {
  if (const auto* b = std::get_if<BesselDrift>(&p.coefficients.variant())) return b->beta;
  throw InvalidArgument("bessel_exact needs Bessel coefficients");
}

double power_alpha(const SdeProblem& p) {
  if (const auto* c = std::get_if<PowerDiffusion>(&p.coefficients.variant())) return c->alpha;
  throw InvalidArgument("power-diffusion schemes need power coefficients");
}

}  // namespace

Path simulate(const SdeProblem& problem, Scheme scheme, const TimeGrid& grid, std::span<const double> dw,
              const SchemeOptions& options) {
  switch (scheme) {
    case Scheme::EulerReflected: return simulate_euler_reflected(problem, grid, dw, options.delta);
    case Scheme::RegularizedDrift:
      return simulate_regularized_drift(problem, grid, dw, options.delta.value_or(default_floor(grid)));
    case Scheme::PowerStickyFree: return simulate_power_diffusion(power_alpha(problem), problem.x0, grid, dw, PowerVariant::StickyFree);
    case Scheme::PowerAbsorbed: return simulate_power_diffusion(power_alpha(problem), problem.x0, grid, dw, PowerVariant::Absorbed);
    case Scheme::BesselExact: break;
  }
  throw InvalidArgument("scheme " + to_string(scheme) + " does not run on Brownian increments");
}

Path simulate(const SdeProblem& problem, Scheme scheme, const TimeGrid& grid, const NoiseSource& noise,
              const SchemeOptions& options) {
  if (scheme == Scheme::BesselExact) return simulate_bessel_exact(bessel_beta(problem), problem.x0, grid, noise);
  const auto dw = sample_brownian(grid, noise);
  return simulate(problem, scheme, grid, dw, options);
}

}  // namespace ssde
