#include "ssde/testfn.hpp"

#include <algorithm>
#include <cmath>

#include "ssde/parallel.hpp"
#include "ssde/quadrature.hpp"

namespace ssde {

namespace {

double raw_mollifier(double x) {
  const double q = (x - 1.0) * (x - 1.0) - 1.0;
  return q < 0.0 ? std::exp(1.0 / q) : 0.0;
}

double mollifier_slope(double x) {
  const double q = (x - 1.0) * (x - 1.0) - 1.0;
  if (!(q < 0.0)) return 0.0;
  return mollifier(x) * (-2.0 * (x - 1.0)) / (q * q);
}

// u_1 and u_1' = Psi tabulated on [0, 2]; evaluated by quintic Hermite
// interpolation using the analytic psi and psi'.
class RampTable {
 public:
  static constexpr int kPanels = 10000;
  static constexpr double kStep = 2.0 / kPanels;

  RampTable() : u_(kPanels + 1), cdf_(kPanels + 1) {
    for (int i = 0; i < kPanels; ++i) {
      const double a = node(i), b = node(i + 1);
      const double mass = integrate([](double z) { return mollifier(z); }, a, b, 1e-17).value;
      const double moment = integrate([b](double z) { return (b - z) * mollifier(z); }, a, b, 1e-17).value;
      cdf_[i + 1] = cdf_[i] + mass;
      u_[i + 1] = u_[i] + cdf_[i] * kStep + moment;
    }
    // psi is symmetric about 1 with unit mass, so u_1(2) = 1 and Psi(2) = 1.
    if (std::abs(cdf_.back() - 1.0) > 1e-12 || std::abs(u_.back() - 1.0) > 1e-12)
      throw std::logic_error("ramp table failed its normalisation check");
    cdf_.back() = 1.0;
    u_.back() = 1.0;
    for (int i = 0; i <= kPanels; ++i) max_slope_ = std::max(max_slope_, std::abs(mollifier_slope(node(i))));
  }

  RampValue operator()(double y) const {
    if (!(y > 0.0)) return {0.0, 0.0, 0.0};
    if (y >= 2.0) return {y - 1.0, 1.0, 0.0};
    const int i = std::min(static_cast<int>(y / kStep), kPanels - 1);
    const double t = (y - node(i)) / kStep;
    const double psi0 = mollifier(node(i)), psi1 = mollifier(node(i + 1));
    const double u = quintic(t, u_[i], u_[i + 1], cdf_[i], cdf_[i + 1], psi0, psi1);
    const double du = quintic(t, cdf_[i], cdf_[i + 1], psi0, psi1, mollifier_slope(node(i)), mollifier_slope(node(i + 1)));
    return {u, du, mollifier(y)};
  }

  double max_slope() const { return max_slope_; }

 private:
  static double node(int i) { return kStep * i; }

  static double quintic(double t, double v0, double v1, double d0, double d1, double dd0, double dd1) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    return (1 - 10 * t3 + 15 * t4 - 6 * t5) * v0 + (10 * t3 - 15 * t4 + 6 * t5) * v1 +
           kStep * ((t - 6 * t3 + 8 * t4 - 3 * t5) * d0 + (-4 * t3 + 7 * t4 - 3 * t5) * d1) +
           kStep * kStep * (0.5 * (t2 - 3 * t3 + 3 * t4 - t5) * dd0 + 0.5 * (t3 - 2 * t4 + t5) * dd1);
  }

  std::vector<double> u_;
  std::vector<double> cdf_;
  double max_slope_ = 0.0;
};

const RampTable& ramp_table() {
  static const RampTable table;
  return table;
}

void require_radius(double r) {
  if (!(r > 0.0)) throw InvalidArgument("flat radius must be positive");
}

}  // namespace

double mollifier_constant() {
  static const double c = 1.0 / integrate(raw_mollifier, 0.0, 2.0, 1e-16, 1e-15).value;
  return c;
}

double mollifier(double x) { return mollifier_constant() * raw_mollifier(x); }

RampValue smooth_ramp(int n, double x) {
  if (n < 1) throw InvalidArgument("smooth_ramp: n must be at least 1");
  const double dn = n;
  const auto r = ramp_table()(dn * x);
  return {r.u / dn, r.du, dn * r.d2u};
}

TestFunction TestFunction::constant(double value) {
  TestFunction f;
  f.offset_ = value;
  f.support_bound_ = 0.0;
  return f;
}

TestFunction TestFunction::bump(double flat_radius) {
  require_radius(flat_radius);
  if (std::isinf(flat_radius)) return constant(0.0);
  TestFunction f;
  const double c = 4.0 / (3.0 * flat_radius);
  f.terms_ = {{0.5, c, flat_radius}, {-0.5, c, flat_radius + 2.0 / c}};
  f.flat_radius_ = flat_radius;
  f.support_bound_ = 4.0 * flat_radius;
  return f;
}

TestFunction TestFunction::ramp(double flat_radius) {
  require_radius(flat_radius);
  TestFunction f;
  const double n = 2.0 / flat_radius;
  f.offset_ = 1.5 * flat_radius;
  f.terms_ = {{1.0 / n, n, flat_radius}};
  f.flat_radius_ = flat_radius;
  f.unbounded_ = true;
  return f;
}

double TestFunction::value(double x) const {
  double v = offset_;
  for (const auto& t : terms_) v += t.weight * ramp_table()(t.scale * (x - t.shift)).u;
  return v;
}

double TestFunction::d1(double x) const {
  double v = 0.0;
  for (const auto& t : terms_) v += t.weight * t.scale * ramp_table()(t.scale * (x - t.shift)).du;
  return v;
}

double TestFunction::d2(double x) const {
  double v = 0.0;
  for (const auto& t : terms_) v += t.weight * t.scale * t.scale * ramp_table()(t.scale * (x - t.shift)).d2u;
  return v;
}

void TestFunction::check_invariants() const {
  if (terms_.empty()) return;
  for (int i = 0; i <= 200; ++i) {
    const double x = flat_radius_ * i / 200.0;
    if (d1(x) != 0.0 || d2(x) != 0.0) throw InvalidArgument("test function is not flat at x=" + std::to_string(x));
  }
  double lipschitz = 0.0;
  double hi = 4.0 * flat_radius_;
  for (const auto& t : terms_) {
    lipschitz += std::abs(t.weight) * t.scale * t.scale * t.scale * ramp_table().max_slope();
    hi = std::max(hi, t.shift + 2.0 / t.scale);
  }
  lipschitz *= 1.01;
  const int samples = 4000;
  const double dx = 1.2 * hi / samples;
  double prev = d2(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double cur = d2(i * dx);
    if (std::abs(cur - prev) > lipschitz * dx + 1e-12)
      throw InvalidArgument("second derivative breaks its modulus near x=" + std::to_string(i * dx));
    prev = cur;
  }
}

TestFunction eta_delta(double delta) {
  if (!(delta > 0.0) || std::isinf(delta)) throw InvalidArgument("eta_delta: delta must be positive and finite");
  TestFunction f;
  const double n = 8.0 / delta;
  f.offset_ = 3.0 * delta / 8.0;
  f.terms_ = {{1.0 / n, n, delta / 4.0}};
  f.flat_radius_ = delta / 4.0;
  f.unbounded_ = true;
  return f;
}

double zeta_delta(double delta, double x) {
  if (!(delta > 0.0)) throw InvalidArgument("zeta_delta: delta must be positive");
  return std::max(x, delta);
}

std::vector<TestFunction> bump_family(std::span<const double> flat_radii) {
  std::vector<TestFunction> out;
  for (double r : flat_radii) out.push_back(TestFunction::bump(r));
  return out;
}

std::vector<TestFunction> ramp_family(std::span<const double> flat_radii) {
  std::vector<TestFunction> out;
  for (double r : flat_radii) out.push_back(TestFunction::ramp(r));
  return out;
}

namespace {

double floor_of(const TestFunction& f) {
  const double r = f.flat_radius();
  return std::isinf(r) ? 1.0 : 0.5 * r;
}

double generator(const TestFunction& f, const CoefficientSpec& c, double x, double floor) {
  const double fp = f.d1(x), fpp = f.d2(x);
  if (fp == 0.0 && fpp == 0.0) return 0.0;
  const double xe = std::max(x, floor);
  const double sigma = c.diffusion(xe);
  return c.drift(xe) * fp + 0.5 * sigma * sigma * fpp;
}

}  // namespace

double ito_residual(const Path& path, std::span<const double> increments, const TestFunction& f,
                    const CoefficientSpec& coefficients) {
  if (increments.size() + 1 != path.values.size())
    throw InvalidArgument("ito_residual: " + std::to_string(increments.size()) + " increments for a path of " +
                          std::to_string(path.values.size()) + " samples");
  const double h = path.grid.step();
  const double floor = floor_of(f);
  const double f0 = f.value(path.values[0]);
  double integral = 0.0, worst = 0.0;
  for (std::size_t j = 0; j < increments.size(); ++j) {
    const double x = path.values[j];
    const double fp = f.d1(x);
    if (fp != 0.0 || f.d2(x) != 0.0) {
      const double sigma = coefficients.diffusion(std::max(x, floor));
      integral += generator(f, coefficients, x, floor) * h + sigma * fp * increments[j];
    }
    worst = std::max(worst, std::abs(f.value(path.values[j + 1]) - f0 - integral));
  }
  return worst;
}

double martingale_increment(const Path& path, const TestFunction& f, const CoefficientSpec& coefficients, double s, double t) {
  if (!(s < t)) throw InvalidArgument("martingale_increment: need s < t");
  const std::size_t ks = path.grid.index_of(s), kt = path.grid.index_of(t);
  const double floor = floor_of(f);
  double integral = 0.0;
  double prev = generator(f, coefficients, path.values[ks], floor);
  for (std::size_t k = ks; k < kt; ++k) {
    const double next = generator(f, coefficients, path.values[k + 1], floor);
    integral += 0.5 * (prev + next);
    prev = next;
  }
  return f.value(path.values[kt]) - f.value(path.values[ks]) - path.grid.step() * integral;
}

double MartingaleStat::max_abs() const {
  double m = std::abs(z);
  for (double v : z_conditional) m = std::max(m, std::abs(v));
  return m;
}

namespace {

constexpr std::size_t kMinEnsemble = 30;

double conditioning(int which, double x) {
  const double g = x / (1.0 + x);
  return which == 0 ? g : g * g;
}

struct Welford {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  double standard_error() const {
    return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  }
  double z() const {
    const double se = standard_error();
    return se > 0.0 ? mean / se : 0.0;
  }
};

// increments[i] and start values xs[i] for every path, in path order.
MartingaleStat summarise(std::span<const double> increments, std::span<const double> xs) {
  Welford plain, cond[2];
  for (std::size_t i = 0; i < increments.size(); ++i) {
    plain.add(increments[i]);
    for (int g = 0; g < 2; ++g) cond[g].add(increments[i] * conditioning(g, xs[i]));
  }
  MartingaleStat s;
  s.z = plain.z();
  s.z_conditional = {cond[0].z(), cond[1].z()};
  s.mean = plain.mean;
  s.standard_error = plain.standard_error();
  s.count = plain.n;
  return s;
}

}  // namespace

MartingaleStat martingale_increment_stat(std::span<const Path> ensemble, const TestFunction& f,
                                         const CoefficientSpec& coefficients, double s, double t) {
  if (ensemble.size() < kMinEnsemble)
    throw InsufficientSample("martingale statistic needs at least 30 paths, got " + std::to_string(ensemble.size()));
  std::vector<double> inc(ensemble.size()), xs(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    inc[i] = martingale_increment(ensemble[i], f, coefficients, s, t);
    xs[i] = ensemble[i].at(s);
  }
  return summarise(inc, xs);
}

std::vector<MartingaleStat> martingale_increment_stats(std::size_t n_paths,
                                                       const std::function<Path(std::size_t)>& make_path,
                                                       std::span<const TestFunction> family,
                                                       const CoefficientSpec& coefficients, double s, double t) {
  if (n_paths < kMinEnsemble)
    throw InsufficientSample("martingale statistic needs at least 30 paths, got " + std::to_string(n_paths));
  const std::size_t m = family.size();
  std::vector<double> inc(n_paths * m), xs(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    const Path path = make_path(i);
    xs[i] = path.at(s);
    for (std::size_t j = 0; j < m; ++j) inc[j * n_paths + i] = martingale_increment(path, family[j], coefficients, s, t);
  });
  std::vector<MartingaleStat> out;
  for (std::size_t j = 0; j < m; ++j) out.push_back(summarise(std::span(inc).subspan(j * n_paths, n_paths), xs));
  return out;
}

}  // namespace ssde
