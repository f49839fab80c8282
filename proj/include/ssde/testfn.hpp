// Smooth test functions that are constant near 0, and the checks built on
// them: the pathwise Ito residual and the martingale-increment statistic.
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ssde/core.hpp"

namespace ssde {

/// C exp(1/((x-1)^2 - 1)) on (0, 2), 0 elsewhere, with C normalising the
/// integral to 1.
double mollifier(double x);
double mollifier_constant();

struct RampValue {
  double u;
  double du;
  double d2u;
};

/// u_n(x) = int_{-inf}^x dy int_{-inf}^y n psi(n z) dz and its first two
/// derivatives. u_n = 0 for x <= 0 and u_n(x) = x - 1/n for x >= 2/n.
RampValue smooth_ramp(int n, double x);

/// f(x) = offset + sum_i w_i u_1(c_i (x - s_i)): a constant, a bump rising from
/// 0 on [r, 4r] to 1, or a ramp equal to x far from 0.
class TestFunction {
 public:
  static TestFunction constant(double value);
  /// Flat (= 0) on [0, r], strictly increasing on (r, 4r), equal to 1 on [4r, inf).
  static TestFunction bump(double flat_radius);
  /// Flat on [0, r], equal to x on [2r, inf).
  static TestFunction ramp(double flat_radius);

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  double flat_radius() const noexcept { return flat_radius_; }
  /// Point beyond which f is constant, when there is one.
  std::optional<double> support_bound() const noexcept { return support_bound_; }
  /// True for ramp-type functions that grow without bound (only local
  /// martingales are expected for them).
  bool unbounded() const noexcept { return unbounded_; }

  /// Throws InvalidArgument unless f' = f'' = 0 at sampled points of
  /// [0, flat_radius] and f'' obeys its Lipschitz modulus on a sampled grid.
  void check_invariants() const;

 private:
  struct Term {
    double weight, scale, shift;
  };
  friend TestFunction eta_delta(double delta);

  double offset_ = 0.0;
  std::vector<Term> terms_;
  double flat_radius_ = std::numeric_limits<double>::infinity();
  std::optional<double> support_bound_;
  bool unbounded_ = false;
};

/// eta_delta(x) = x on [delta/2, inf), constant (= 3 delta / 8) on [0, delta/4],
/// nondecreasing and C^2.
TestFunction eta_delta(double delta);

/// max(x, delta).
double zeta_delta(double delta, double x);

/// One bump per radius; an infinite radius yields the constant 0.
std::vector<TestFunction> bump_family(std::span<const double> flat_radii);

/// One ramp per radius (flagged unbounded).
std::vector<TestFunction> ramp_family(std::span<const double> flat_radii);

/// max_k |f(x_k) - f(x_0) - sum_{j<k} [(a f' + sigma^2 f''/2)(x_j) h + sigma f'(x_j) dW_j]|,
/// coefficients evaluated at max(x, flat_radius/2).
double ito_residual(const Path& path, std::span<const double> increments, const TestFunction& f,
                    const CoefficientSpec& coefficients);

/// Y_f(t) - Y_f(s) = f(x(t)) - f(x(s)) - int_s^t (a f' + sigma^2 f''/2)(x(u)) du
/// (trapezoid rule on the grid; coefficients at max(x, flat_radius/2)).
double martingale_increment(const Path& path, const TestFunction& f, const CoefficientSpec& coefficients, double s, double t);

/// Standardised means. `z` tests E[increment] = 0; `z_conditional` tests
/// E[increment * g(x(s))] = 0 for g(x) = x/(1+x) and its square. Each z is
/// mean / standard error, and 0 when the standard error vanishes.
struct MartingaleStat {
  double z = 0.0;
  std::vector<double> z_conditional;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;

  /// Largest |z| over the unconditional and conditional statistics.
  double max_abs() const;
};

MartingaleStat martingale_increment_stat(std::span<const Path> ensemble, const TestFunction& f,
                                         const CoefficientSpec& coefficients, double s, double t);

/// Same statistic over `n_paths` paths drawn on demand by `make_path(i)`, for
/// every function of `family` at once; paths are generated in parallel and
/// never stored.
std::vector<MartingaleStat> martingale_increment_stats(std::size_t n_paths,
                                                       const std::function<Path(std::size_t)>& make_path,
                                                       std::span<const TestFunction> family,
                                                       const CoefficientSpec& coefficients, double s, double t);

}  // namespace ssde
