// Occupation-based local-time estimators and the occupation / principal-value
// identities of the Bessel process.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ssde/core.hpp"

namespace ssde {

/// Window estimate (1/eps) * |{s <= t : level <= x(s) < level + eps}| at
/// every grid time (left Riemann sum); nondecreasing and zero at t = 0.
struct LocalTimeEstimate {
  double level;
  double window;
  TimeGrid grid;
  std::vector<double> values;

  double at(double t) const { return values[grid.index_of(t)]; }
  double final_value() const { return values.back(); }
};

/// value_at(t_k) = (h / window) * #{j < k : level <= x_j < level + window}.
LocalTimeEstimate occupation_local_time(const Path& path, double level, double window);

/// One estimate per level (strictly increasing, nonnegative), same window.
std::vector<LocalTimeEstimate> local_time_profile(const Path& path, std::span<const double> levels, double window);

/// Bessel speed mass of [a, b]: the integral of u^(beta-1) du.
double speed_mass(double beta, double a, double b);

/// Local time normalised against u^(beta-1) du instead of du, the
/// normalisation in which the Bessel occupation formula reads
///   int_0^t phi(rho(s)) ds = int_0^inf phi(x) L_x(t) x^(beta-1) dx.
LocalTimeEstimate speed_local_time(const Path& path, double level, double window, double beta);

struct OccupationBalance {
  double time_integral = 0.0;   ///< h * sum_{j<n} phi(x_j)
  double level_integral = 0.0;  ///< sum over levels of phi(a) L_a m([a, a + da))
  double residual() const;
  double relative_residual() const;  ///< residual / |time_integral|, 0 when both vanish
};

/// Both sides of the occupation formula at the path horizon. Level spacing is
/// the gap to the next level (the window for the last one).
OccupationBalance occupation_balance(const Path& path, const std::function<double(double)>& phi, double beta,
                                     std::span<const double> levels, double window);

/// |time integral - level integral| at the horizon.
double occupation_identity_residual(const Path& path, const std::function<double(double)>& phi, double beta,
                                    std::span<const double> levels, double window);

/// `count` levels a_min * r^i, i < count, with r = (a_max / a_min)^(1/count).
std::vector<double> geometric_levels(double a_min, double a_max, std::size_t count);

/// Principal value k(t) = int_0^inf a^(beta-2) (L_a(t) - L_0(t)) da for
/// beta in (0, 1), on every grid time.
///
/// `levels` are the left edges of the level cells (the last cell ends at
/// a_max, which must exceed the path's range). On each cell the integrand
/// weight is integrated exactly against the cell's speed mass; L_0 uses the
/// window [0, window). The part below levels[0] is dropped and the tail
/// beyond a_max, where L_a = 0, is integrated in closed form.
std::vector<double> principal_value_k(const Path& path, double beta, double a_max, std::span<const double> levels,
                                      double window);

/// h * #{j < n : x_j < eta} / horizon.
double zero_time_fraction(const Path& path, double eta);

/// Maximal runs of consecutive samples strictly above `level` (inclusive
/// index bounds).
struct Excursion {
  std::size_t first;
  std::size_t last;
};
std::vector<Excursion> excursions_above(const Path& path, double level);

}  // namespace ssde
