// Goodness-of-fit and Monte Carlo error helpers.
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ssde {

/// sup_y |F_N(y) - F(y)| over the sample points, both one-sided gaps.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Same statistic from ascending samples and the CDF already evaluated at them.
double ks_distance_sorted(std::span<const double> ascending, std::span<const double> cdf_values);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov quantile c(alpha) = sqrt(-ln(alpha/2)/2) scaled by
/// 1/sqrt(n); alpha = 0.01 gives 1.6276/sqrt(n).
double ks_critical_value(std::size_t n, double alpha);
double ks_two_sample_critical_value(std::size_t n, std::size_t m, double alpha);

struct MeanCi {
  double mean;
  double half_width;
};

/// Normal-approximation confidence interval mean +- z_level * sd / sqrt(N).
/// Throws InsufficientSample for N < 30.
MeanCi mc_mean_ci(std::span<const double> samples, double level);

/// Two-sided standard normal quantile for a central coverage `level`.
double normal_two_sided_quantile(double level);

double normal_cdf(double x);

struct SampleSummary {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

SampleSummary summarize(std::span<const double> samples);

}  // namespace ssde
