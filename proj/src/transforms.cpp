#include "ssde/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ssde/quadrature.hpp"

namespace ssde {

namespace {

constexpr int kNodesPerOctave = 128;
constexpr int kLowestOctave = -42;
constexpr int kHighestOctave = 20;
constexpr std::size_t kNodeCount = static_cast<std::size_t>((kHighestOctave - kLowestOctave) * kNodesPerOctave) + 1;
constexpr std::size_t kUnitNode = static_cast<std::size_t>(-kLowestOctave * kNodesPerOctave);
const double kDu = std::numbers::ln2 / kNodesPerOctave;

// Octaves [2^-k-1, 2^-k] inspected by the integrability test.
constexpr int kBranchOctaves = 40;
constexpr int kBranchWindow = 10;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Hermite {
  double h00, h10, h01, h11;
  explicit Hermite(double t) {
    const double t2 = t * t, t3 = t2 * t;
    h00 = 2 * t3 - 3 * t2 + 1;
    h10 = (t3 - 2 * t2 + t) * kDu;
    h01 = -2 * t3 + 3 * t2;
    h11 = (t3 - t2) * kDu;
  }
};

double hermite(const std::vector<double>& v, const std::vector<double>& d, std::size_t i, const Hermite& w) {
  return w.h00 * v[i] + w.h10 * d[i] + w.h01 * v[i + 1] + w.h11 * d[i + 1];
}

// Quintic Hermite interpolation from values, first and second derivatives.
double quintic(const std::vector<double>& v, const std::vector<double>& d, const std::vector<double>& dd, std::size_t i,
               double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h3 = 0.5 * (t3 - 2 * t4 + t5);
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
  return h0 * v[i] + h5 * v[i + 1] + kDu * (h1 * d[i] + h4 * d[i + 1]) + kDu * kDu * (h2 * dd[i] + h3 * dd[i + 1]);
}

double quintic_slope(const std::vector<double>& v, const std::vector<double>& d, const std::vector<double>& dd,
                     std::size_t i, double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double h0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double h1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double h2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double h3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const double h4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double h5 = 30 * t2 - 60 * t3 + 30 * t4;
  return h0 * v[i] + h5 * v[i + 1] + kDu * (h1 * d[i] + h4 * d[i + 1]) + kDu * kDu * (h2 * dd[i] + h3 * dd[i + 1]);
}

}  // namespace

std::size_t ScaleTransform::locate(double x) const {
  const double pos = (std::log2(x) - kLowestOctave) * kNodesPerOctave - static_cast<double>(first_node_);
  const std::size_t last = xs_.size() - 2;
  auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(last)));
  if (x < xs_[i] && i > 0) --i;
  if (x >= xs_[i + 1] && i < last) ++i;
  return i;
}

ScaleTransform::Point ScaleTransform::evaluate(double x) const {
  if (!(x >= 0.0) || x > xs_.back() || (x == 0.0 && branch_ == ScaleBranch::Infinite))
    throw TransformError("scale function evaluated outside its domain, x=" + fmt(x));
  if (x < xs_.front()) {
    if (branch_ == ScaleBranch::Infinite)
      throw TransformError("scale function evaluated below the tabulated range: x=" + fmt(x));
    const double p = -dlog_rho_[0];
    const double r = x / xs_[0];
    return {s_[0] * std::pow(r, 1.0 - p), std::exp(log_rho_[0]) * std::pow(r, -p)};
  }
  const std::size_t i = locate(x);
  const double t = std::log(x / xs_[i]) / kDu;
  return {quintic(s_, ds_, dds_, i, t), std::exp(hermite(log_rho_, dlog_rho_, i, Hermite(t)))};
}

double ScaleTransform::s(double x) const { return evaluate(x).s; }

double ScaleTransform::rho(double x) const { return evaluate(x).rho; }

double ScaleTransform::log_rho(double x) const { return std::log(rho(x)); }

double ScaleTransform::s_inv(double y) const {
  const double lo = branch_ == ScaleBranch::Finite ? 0.0 : s_.front();
  if (!(y >= lo && y <= s_.back()))
    throw TransformError("inverse scale function evaluated outside [" + fmt(lo) + ", " + fmt(s_.back()) + "]: y=" + fmt(y));
  if (y < s_.front()) {
    if (y == 0.0) return 0.0;
    const double p = -dlog_rho_[0];
    return xs_[0] * std::pow(y / s_[0], 1.0 / (1.0 - p));
  }
  auto it = std::upper_bound(s_.begin(), s_.end(), y);
  std::size_t i = it == s_.end() ? s_.size() - 2 : static_cast<std::size_t>(it - s_.begin()) - 1;
  i = std::min(i, s_.size() - 2);
  // Safeguarded Newton on the interpolant in the panel variable t in [0, 1].
  double a = 0.0, b = 1.0;
  const double span = s_[i + 1] - s_[i];
  double t = span > 0.0 ? std::clamp((y - s_[i]) / span, 0.0, 1.0) : 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double f = quintic(s_, ds_, dds_, i, t) - y;
    if (f == 0.0) break;
    if (f > 0.0)
      b = t;
    else
      a = t;
    const double slope = quintic_slope(s_, ds_, dds_, i, t);
    double next = slope > 0.0 ? t - f / slope : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-16 || b - a <= 1e-16) {
      t = next;
      break;
    }
    t = next;
  }
  return xs_[i] * std::exp(t * kDu);
}

double ScaleTransform::kappa(double y) const {
  const double x = s_inv(y);
  return rho(x) * coefficients_.diffusion(x);
}

ScaleTransform build_scale(const CoefficientSpec& coefficients, double quad_tol) {
  if (!(quad_tol > 0.0)) throw InvalidArgument("build_scale: quadrature tolerance must be positive");
  auto node = [](std::size_t i) {
    return std::ldexp(std::exp2(static_cast<double>(i % kNodesPerOctave) / kNodesPerOctave),
                      kLowestOctave + static_cast<int>(i / kNodesPerOctave));
  };
  auto g = [&](double y) {
    const double sigma = coefficients.diffusion(y);
    return 2.0 * coefficients.drift(y) / (sigma * sigma);
  };
  auto slope = [&](std::size_t i) {
    const double x = node(i);
    const double sigma = coefficients.diffusion(x);
    if (!(sigma != 0.0) || !std::isfinite(sigma))
      throw TransformError("diffusion coefficient vanishes or is not finite at x=" + fmt(x));
    const double d = -x * g(x);
    if (!std::isfinite(d)) throw TransformError("2a/sigma^2 is not finite at x=" + fmt(x));
    return d;
  };
  auto panel = [&](std::size_t i) {
    try {
      return integrate(g, node(i), node(i + 1), 1e-300, quad_tol).value;
    } catch (const QuadratureError&) {
      throw TransformError("integral of 2a/sigma^2 over [" + fmt(node(i)) + ", " + fmt(node(i + 1)) +
                           "] did not converge");
    }
  };

  // log rho outward from x = 1 until it leaves [-kLogRhoLimit, kLogRhoLimit].
  constexpr double kLogRhoLimit = 650.0;
  std::vector<double> down{0.0}, up;
  std::size_t lo = kUnitNode, hi = kUnitNode;
  while (lo > 0) {
    const double v = down.back() + panel(lo - 1);
    if (std::abs(v) > kLogRhoLimit) break;
    down.push_back(v);
    --lo;
  }
  const bool truncated_below = lo > 0;
  const double below_sign = truncated_below ? down.back() + panel(lo - 1) : 0.0;
  double last = 0.0;
  while (hi + 1 < kNodeCount) {
    const double v = last - panel(hi);
    if (std::abs(v) > kLogRhoLimit) break;
    up.push_back(v);
    last = v;
    ++hi;
  }

  ScaleTransform t(coefficients);
  t.first_node_ = lo;
  const std::size_t n = hi - lo + 1;
  if (n < 2) throw TransformError("rho overflows next to x=1");
  t.xs_.resize(n);
  t.log_rho_.resize(n);
  t.dlog_rho_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.xs_[i] = node(lo + i);
    t.dlog_rho_[i] = slope(lo + i);
  }
  const std::size_t unit = kUnitNode - lo;
  for (std::size_t k = 0; k < down.size(); ++k) t.log_rho_[unit - k] = down[k];
  for (std::size_t k = 0; k < up.size(); ++k) t.log_rho_[unit + 1 + k] = up[k];

  // Panel integrals of rho, in the variable u = log x.
  std::vector<double> mass(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto f = [&](double tau) {
      return std::exp(hermite(t.log_rho_, t.dlog_rho_, i, Hermite(tau)) + tau * kDu) * t.xs_[i] * kDu;
    };
    try {
      mass[i] = integrate(f, 0.0, 1.0, 1e-300, quad_tol).value;
    } catch (const QuadratureError&) {
      throw TransformError("integral of rho over [" + fmt(t.xs_[i]) + ", " + fmt(t.xs_[i + 1]) + "] did not converge");
    }
    if (!std::isfinite(mass[i]))
      throw TransformError("integral of rho over [" + fmt(t.xs_[i]) + ", " + fmt(t.xs_[i + 1]) + "] is not finite");
  }

  // Integrability of rho at 0 from the ratios of successive octave integrals.
  const std::size_t needed = static_cast<std::size_t>((kBranchOctaves + 1) * kNodesPerOctave);
  if (unit < needed) {
    t.branch_ = truncated_below && below_sign > 0.0 ? ScaleBranch::Infinite : ScaleBranch::Finite;
  } else {
    auto octave = [&](int k) {
      const std::size_t top = unit - static_cast<std::size_t>(k * kNodesPerOctave);
      double sum = 0.0;
      for (std::size_t i = top - kNodesPerOctave; i < top; ++i) sum += mass[i];
      return sum;
    };
    double log_ratio = 0.0;
    for (int k = kBranchOctaves - kBranchWindow; k < kBranchOctaves; ++k) log_ratio += std::log(octave(k + 1) / octave(k));
    log_ratio /= kBranchWindow;
    t.branch_ = log_ratio < -1e-6 ? ScaleBranch::Finite : ScaleBranch::Infinite;
  }

  t.s_.assign(n, 0.0);
  if (t.branch_ == ScaleBranch::Finite) {
    const double p = -t.dlog_rho_[0];
    if (!(p < 1.0)) throw TransformError("integral of rho over (0, " + fmt(t.xs_[0]) + "] has no power-law tail");
    t.s_[0] = std::exp(t.log_rho_[0]) * t.xs_[0] / (1.0 - p);
    for (std::size_t i = 1; i < n; ++i) t.s_[i] = t.s_[i - 1] + mass[i - 1];
  } else {
    for (std::size_t i = unit; i-- > 0;) t.s_[i] = t.s_[i + 1] - mass[i];
    for (std::size_t i = unit + 1; i < n; ++i) t.s_[i] = t.s_[i - 1] + mass[i - 1];
  }
  t.ds_.resize(n);
  t.dds_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.ds_[i] = t.xs_[i] * std::exp(t.log_rho_[i]);
    t.dds_[i] = t.ds_[i] * (1.0 + t.dlog_rho_[i]);
  }
  return t;
}

std::vector<double> clock_D(const Path& path, double delta, const ScaleTransform& transform) {
  if (!(delta > 0.0)) throw InvalidArgument("clock_D: delta must be positive");
  const double level = transform.s(delta);
  const double h = path.grid.step();
  std::vector<double> d(path.values.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t j = 0; j + 1 < path.values.size(); ++j) {
    const double x = path.values[j];
    const bool above_x = x > delta;
    const bool above_y = transform.s(std::max(x, delta)) > level;
    if (above_x != above_y) throw TransformError("level test disagrees between x and s(x) at index " + std::to_string(j));
    if (above_x) ++count;
    d[j + 1] = h * static_cast<double>(count);
  }
  return d;
}

double inverse_clock(std::span<const double> clock, const TimeGrid& grid, double t) {
  if (clock.size() != grid.size()) throw InvalidArgument("inverse_clock: clock and grid lengths differ");
  if (!(t >= 0.0)) throw InvalidArgument("inverse_clock: t must be nonnegative");
  if (t >= clock.back()) throw OutOfClock("inverse_clock: t=" + fmt(t) + " is beyond the clock's range " + fmt(clock.back()));
  const auto it = std::upper_bound(clock.begin(), clock.end(), t);
  return grid.time(static_cast<std::size_t>(it - clock.begin()));
}

double ReducedPath::value_at(double t) const {
  if (!(t >= 0.0 && t <= grid.horizon() * (1.0 + 1e-12)))
    throw OutOfClock("reduced path queried at t=" + fmt(t) + " beyond " + fmt(grid.horizon()));
  const double pos = t / grid.step();
  const auto k = std::min(static_cast<std::size_t>(pos), grid.n_steps() - 1);
  const double w = std::min(pos - static_cast<double>(k), 1.0);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

ReducedPath reduce_to_reflected(const Path& path, const ScaleTransform& transform, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("reduce_to_reflected: delta must be positive");
  const double h = path.grid.step();
  std::vector<double> clock;  // A at each retained sample
  std::vector<double> u;      // U at each retained sample
  double a = 0.0;
  for (std::size_t j = 0; j + 1 < path.values.size(); ++j) {
    const double x = path.values[j];
    if (!(x > delta)) continue;
    const auto p = transform.evaluate(x);
    const double k = p.rho * transform.coefficients().diffusion(x);
    clock.push_back(a);
    u.push_back(p.s);
    a += h * k * k;
  }
  if (u.size() < 2) throw ReductionError("degenerate clock: the path spends no time above delta=" + fmt(delta));

  std::vector<double> steps(clock.size() - 1);
  for (std::size_t m = 0; m + 1 < clock.size(); ++m) steps[m] = clock[m + 1] - clock[m];
  std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
  const double step = steps[steps.size() / 2];
  const double end = clock.back();
  const auto n_out = static_cast<std::size_t>(std::floor(end / step));
  if (!(step > 0.0) || n_out == 0) throw ReductionError("degenerate clock: A does not advance");

  ReducedPath out{TimeGrid(step, n_out), std::vector<double>(n_out + 1), transform.s(delta), end};
  std::size_t m = 0;
  for (std::size_t i = 0; i <= n_out; ++i) {
    const double t = static_cast<double>(i) * step;
    while (m + 2 < clock.size() && clock[m + 1] <= t) ++m;
    const double span = clock[m + 1] - clock[m];
    const double w = std::clamp((t - clock[m]) / span, 0.0, 1.0);
    out.values[i] = (1.0 - w) * u[m] + w * u[m + 1];
  }
  return out;
}

}  // namespace ssde
