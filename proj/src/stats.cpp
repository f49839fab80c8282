#include "ssde/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "ssde/core.hpp"

namespace ssde {

double ks_distance_sorted(std::span<const double> xs, std::span<const double> cdf) {
  if (xs.empty()) throw InvalidArgument("ks_distance: no samples");
  if (cdf.size() != xs.size()) throw InvalidArgument("ks_distance: cdf values do not match samples");
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // Ties: the empirical CDF jumps once, after the last equal sample.
    std::size_t j = i;
    while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(j + 1) / n;
    d = std::max({d, above - cdf[i], cdf[i] - below});
    i = j;
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_distance: no samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  std::vector<double> values(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) values[i] = cdf(xs[i]);
  return ks_distance_sorted(xs, values);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double v = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == v) ++i;
    while (j < xb.size() && xb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("ks_critical_value: bad arguments");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0 || !(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("ks_two_sample_critical_value: bad arguments");
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((nn + mm) / (nn * mm));
}

double normal_two_sided_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

SampleSummary summarize(std::span<const double> samples) {
  SampleSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : samples) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  s.mean = mean;
  if (k > 1) s.standard_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
  return s;
}

MeanCi mc_mean_ci(std::span<const double> samples, double level) {
  if (samples.size() < 30) throw InsufficientSample("mc_mean_ci: need at least 30 samples");
  const auto s = summarize(samples);
  return {s.mean, normal_two_sided_quantile(level) * s.standard_error};
}

}  // namespace ssde
