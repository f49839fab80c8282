#include "ssde/core.hpp"

#include <algorithm>
#include <cmath>

namespace ssde {

TimeGrid::TimeGrid(double step, std::size_t n_steps) : step_(step), n_steps_(n_steps) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("time grid step must be positive");
  if (n_steps == 0) throw InvalidArgument("time grid needs at least one step");
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = time(k);
  return out;
}

std::size_t TimeGrid::index_of(double t) const {
  const double r = t / step_;
  const double k = std::round(r);
  if (k < 0.0 || k > static_cast<double>(n_steps_) || std::abs(r - k) > 1e-6)
    throw InvalidArgument("time " + std::to_string(t) + " is not a grid time");
  return static_cast<std::size_t>(k);
}

TimeGrid make_grid(double step, double horizon) {
  if (!(step > 0.0)) throw InvalidArgument("make_grid: step must be positive");
  if (!(horizon > 0.0)) throw InvalidArgument("make_grid: horizon must be positive");
  if (horizon < step) throw InvalidArgument("make_grid: horizon shorter than one step");
  const double ratio = horizon / step;
  // Ratios such as 1.0 / 1e-4 land a few ulps above the integer.
  const auto n = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  return TimeGrid(step, std::max<std::size_t>(n, 1));
}

double PowerDiffusion::diffusion(double x) const { return std::pow(x, alpha); }

CoefficientSpec CoefficientSpec::bessel(double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("Bessel dimension must be positive");
  return CoefficientSpec(BesselDrift{beta});
}

CoefficientSpec CoefficientSpec::power(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidArgument("power-diffusion exponent must lie in (0, 1/2)");
  return CoefficientSpec(PowerDiffusion{alpha});
}

CoefficientSpec CoefficientSpec::unit() { return CoefficientSpec(UnitDiffusion{}); }

CoefficientSpec CoefficientSpec::custom(std::function<double(double)> a, std::function<double(double)> sigma) {
  if (!a || !sigma) throw InvalidArgument("custom coefficients need both a and sigma");
  return CoefficientSpec(CustomCoefficients{std::move(a), std::move(sigma)});
}

double CoefficientSpec::drift(double x) const {
  return visit([x](const auto& c) { return c.drift(x); });
}

double CoefficientSpec::diffusion(double x) const {
  return visit([x](const auto& c) { return c.diffusion(x); });
}

std::string CoefficientSpec::name() const {
  struct Namer {
    std::string operator()(const BesselDrift& c) const { return "bessel(beta=" + std::to_string(c.beta) + ")"; }
    std::string operator()(const PowerDiffusion& c) const { return "power(alpha=" + std::to_string(c.alpha) + ")"; }
    std::string operator()(const UnitDiffusion&) const { return "unit"; }
    std::string operator()(const CustomCoefficients&) const { return "custom"; }
  };
  return std::visit(Namer{}, v_);
}

namespace {

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo * std::exp(step * static_cast<double>(i));
  return xs;
}

}  // namespace

LipschitzProbe probe_local_lipschitz(const CoefficientSpec& c, double eps, std::size_t samples) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("probe_local_lipschitz: eps must lie in (0,1)");
  if (samples < 2) throw InvalidArgument("probe_local_lipschitz: need at least two samples");
  const auto xs = log_spaced(eps, 1.0 / eps, samples);
  LipschitzProbe probe;
  double prev_a = c.drift(xs[0]);
  double prev_s = c.diffusion(xs[0]);
  probe.finite = std::isfinite(prev_a) && std::isfinite(prev_s);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double a = c.drift(xs[i]);
    const double s = c.diffusion(xs[i]);
    if (!std::isfinite(a) || !std::isfinite(s)) {
      probe.finite = false;
      continue;
    }
    const double dx = xs[i] - xs[i - 1];
    probe.drift_quotient = std::max(probe.drift_quotient, std::abs(a - prev_a) / dx);
    probe.diffusion_quotient = std::max(probe.diffusion_quotient, std::abs(s - prev_s) / dx);
    prev_a = a;
    prev_s = s;
  }
  return probe;
}

bool diffusion_nondegenerate(const CoefficientSpec& c, double eps, std::size_t samples) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("diffusion_nondegenerate: eps must lie in (0,1)");
  for (double x : log_spaced(eps, 1.0 / eps, std::max<std::size_t>(samples, 2))) {
    const double s = c.diffusion(x);
    if (!(s != 0.0) || !std::isfinite(s)) return false;
  }
  return true;
}

std::string to_string(Representation r) {
  switch (r) {
    case Representation::DriftIntegral: return "drift-integral";
    case Representation::Reflected: return "reflected";
    case Representation::PrincipalValue: return "principal-value";
    case Representation::PureDiffusion: return "pure-diffusion";
  }
  return "unknown";
}

SdeProblem::SdeProblem(double x0_, CoefficientSpec coefficients_, Representation representation_)
    : x0(x0_), coefficients(std::move(coefficients_)), representation(representation_) {
  if (!(x0 >= 0.0) || !std::isfinite(x0)) throw InvalidArgument("initial point must be finite and nonnegative");
}

void check_path_invariants(const Path& path) {
  if (path.values.size() != path.grid.size()) throw InvalidArgument("path length does not match its grid");
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    if (!(path.values[k] >= 0.0)) throw InvalidArgument("path value negative at index " + std::to_string(k));
  }
  if (!path.reflection) return;
  const auto& l = *path.reflection;
  if (l.size() != path.values.size()) throw InvalidArgument("reflection term length mismatch");
  if (l[0] != 0.0) throw InvalidArgument("reflection term must start at 0");
  for (std::size_t k = 1; k < l.size(); ++k) {
    if (l[k] < l[k - 1]) throw InvalidArgument("reflection term decreases at index " + std::to_string(k));
    if (l[k] > l[k - 1] && path.values[k] != 0.0)
      throw InvalidArgument("reflection term grows away from 0 at index " + std::to_string(k));
  }
}

}  // namespace ssde
