// Scale function and time changes that carry a solution, observed above a
// level delta, to Brownian motion reflected at s(delta).
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssde/core.hpp"

namespace ssde {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfClock : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Which normalisation of s is in force: s(x) = int_0^x rho when rho is
/// integrable at 0, s(x) = -int_x^1 rho otherwise.
enum class ScaleBranch { Finite, Infinite };

/// rho(x) = exp(int_x^1 2a/sigma^2), the scale function s with s' = rho, its
/// inverse, and kappa(y) = rho(s^-1(y)) sigma(s^-1(y)).
///
/// Values are tabulated on a log-spaced grid over [2^-42, 2^20] (128 nodes per
/// octave) by panel-wise adaptive quadrature and evaluated by Hermite
/// interpolation in log x (cubic for log rho, quintic for s) with the exact
/// derivatives at the nodes. The table
/// stops early on either side where |log rho| exceeds 650.
class ScaleTransform {
 public:
  struct Point {
    double s;
    double rho;
  };

  double rho(double x) const;
  double log_rho(double x) const;
  double s(double x) const;
  Point evaluate(double x) const;  ///< s and rho with one table lookup
  double s_inv(double y) const;
  double kappa(double y) const;

  ScaleBranch branch() const noexcept { return branch_; }
  const CoefficientSpec& coefficients() const noexcept { return coefficients_; }
  double lower_limit() const noexcept { return xs_.front(); }
  double upper_limit() const noexcept { return xs_.back(); }

 private:
  friend ScaleTransform build_scale(const CoefficientSpec&, double);
  explicit ScaleTransform(CoefficientSpec c) : coefficients_(std::move(c)) {}

  std::size_t locate(double x) const;

  CoefficientSpec coefficients_;
  ScaleBranch branch_ = ScaleBranch::Finite;
  std::size_t first_node_ = 0;    // position of xs_[0] on the full log grid
  std::vector<double> xs_;        // nodes
  std::vector<double> log_rho_;   // log rho at nodes
  std::vector<double> dlog_rho_;  // d log rho / d log x at nodes
  std::vector<double> s_;         // s at nodes
  std::vector<double> ds_;        // d s / d log x = x rho at nodes
  std::vector<double> dds_;       // second derivative of s in log x at nodes
};

/// Tabulates the scale transform. `quad_tol` is the relative tolerance of
/// every panel integral. Throws TransformError naming the integral that fails
/// to converge, or when sigma vanishes on a node.
ScaleTransform build_scale(const CoefficientSpec& coefficients, double quad_tol = 1e-12);

/// D[k] = h * #{j < k : x_j > delta}, with the level test also carried out on
/// y = s(x v delta) > s(delta) and checked to agree.
std::vector<double> clock_D(const Path& path, double delta, const ScaleTransform& transform);

/// Smallest grid time t_k with clock[k] > t. Throws OutOfClock when
/// t >= clock.back().
double inverse_clock(std::span<const double> clock, const TimeGrid& grid, double t);

/// Output of reduce_to_reflected: samples of V on a uniform new-time grid.
struct ReducedPath {
  TimeGrid grid;
  std::vector<double> values;
  double reflect_level;  ///< Delta = s(delta)
  double clock_end;      ///< A at the last retained sample

  /// Linear interpolation at new time t (0 <= t <= grid.horizon()).
  double value_at(double t) const;
};

/// y = s(x v delta), time-changed by the inverse of D (dropping the time spent
/// at or below delta) and then by the inverse of A(t) = int kappa^2(U); the
/// result is resampled onto a uniform grid whose step is the median
/// A-increment. Throws ReductionError when too little time is spent above
/// delta.
ReducedPath reduce_to_reflected(const Path& path, const ScaleTransform& transform, double delta);

}  // namespace ssde
