// Globally adaptive 7/15-point Gauss-Kronrod quadrature on finite intervals.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssde {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [a, b] until the summed error estimate is below
/// max(abs_tol, rel_tol * |value|). Throws QuadratureError when `max_intervals`
/// subdivisions do not suffice or the integrand is not finite.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0, int max_intervals = 4000) {
  if (a == b) return {};
  if (b < a) {
    QuadResult r = integrate(f, b, a, abs_tol, rel_tol, max_intervals);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gauss_kronrod15(f, a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (!std::isfinite(value)) throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    if (intervals >= max_intervals)
      throw QuadratureError("no convergence on [" + std::to_string(a) + ", " + std::to_string(b) + "], error estimate " + std::to_string(error));
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval exhausted at machine precision; accept what we have.
      heap.push({worst.a, worst.b, worst.value, 0.0});
      error -= worst.error;
      continue;
    }
    const detail::Segment left = detail::gauss_kronrod15(f, worst.a, mid);
    const detail::Segment right = detail::gauss_kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running totals.
  double total = 0.0, total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(total)) throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  return {total, total_err, intervals};
}

}  // namespace ssde
