// Domain types shared by every part of the library: time grids, coefficient
// specifications, problems and sampled paths.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ssde {

// ---------------------------------------------------------------------------
// Errors

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemeError : public std::runtime_error {
 public:
  SchemeError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// ---------------------------------------------------------------------------
// Time grid

/// Uniform grid t_k = k * step, k = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double step, std::size_t n_steps);

  double step() const noexcept { return step_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * step_; }
  double horizon() const noexcept { return time(n_steps_); }
  std::vector<double> times() const;

  /// Index of the grid point equal to `t` (up to rounding); throws if `t` is
  /// not on the grid.
  std::size_t index_of(double t) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double step_;
  std::size_t n_steps_;
};

/// Grid covering [0, horizon]; the horizon is rounded up to whole steps.
TimeGrid make_grid(double step, double horizon);

// ---------------------------------------------------------------------------
// Coefficients

/// Bessel drift (beta - 1) / (2x), unit diffusion.
struct BesselDrift {
  double beta;
  double drift(double x) const noexcept { return 0.5 * (beta - 1.0) / x; }
  double diffusion(double) const noexcept { return 1.0; }
};

/// Zero drift, diffusion x^alpha with alpha in (0, 1/2).
struct PowerDiffusion {
  double alpha;
  double drift(double) const noexcept { return 0.0; }
  double diffusion(double x) const;
};

struct UnitDiffusion {
  double drift(double) const noexcept { return 0.0; }
  double diffusion(double) const noexcept { return 1.0; }
};

struct CustomCoefficients {
  std::function<double(double)> a;
  std::function<double(double)> sigma;
  double drift(double x) const { return a(x); }
  double diffusion(double x) const { return sigma(x); }
};

class CoefficientSpec {
 public:
  using Variant = std::variant<BesselDrift, PowerDiffusion, UnitDiffusion, CustomCoefficients>;

  static CoefficientSpec bessel(double beta);
  static CoefficientSpec power(double alpha);
  static CoefficientSpec unit();
  static CoefficientSpec custom(std::function<double(double)> a, std::function<double(double)> sigma);

  double drift(double x) const;
  double diffusion(double x) const;

  /// Calls `fn` with the concrete coefficient type so hot loops avoid
  /// per-step dispatch.
  template <class F>
  decltype(auto) visit(F&& fn) const {
    return std::visit(std::forward<F>(fn), v_);
  }

  const Variant& variant() const noexcept { return v_; }
  std::string name() const;

 private:
  explicit CoefficientSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct LipschitzProbe {
  double drift_quotient = 0.0;      ///< max |a(x)-a(y)|/|x-y| over sampled neighbours
  double diffusion_quotient = 0.0;  ///< same for sigma
  bool finite = true;               ///< every sampled value was finite
};

/// Sampled difference quotients on [eps, 1/eps] (log-spaced, `samples` points).
LipschitzProbe probe_local_lipschitz(const CoefficientSpec& c, double eps, std::size_t samples = 2000);

/// True when sigma is nonzero at every sampled point of [eps, 1/eps].
bool diffusion_nondegenerate(const CoefficientSpec& c, double eps, std::size_t samples = 2000);

// ---------------------------------------------------------------------------
// Problem

enum class Representation { DriftIntegral, Reflected, PrincipalValue, PureDiffusion };

std::string to_string(Representation r);

struct SdeProblem {
  double x0;
  CoefficientSpec coefficients;
  Representation representation;

  SdeProblem(double x0, CoefficientSpec coefficients, Representation representation);
};

// ---------------------------------------------------------------------------
// Path

struct Path {
  TimeGrid grid;
  std::vector<double> values;
  /// Accumulated reflection term l(t) of the Skorokhod decomposition, when the
  /// scheme tracks one.
  std::optional<std::vector<double>> reflection;

  double at(double t) const { return values[grid.index_of(t)]; }
  double final_value() const { return values.back(); }
};

/// Throws InvalidArgument when the path violates non-negativity, length, or
/// the reflection-term support condition.
void check_path_invariants(const Path& path);

}  // namespace ssde
