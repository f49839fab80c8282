#include "ssde/localtime.hpp"

#include <algorithm>
#include <cmath>

namespace ssde {

namespace {

void require_levels(std::span<const double> levels) {
  if (levels.empty()) throw InvalidArgument("level sequence is empty");
  if (!(levels[0] >= 0.0)) throw InvalidArgument("levels must be nonnegative");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1])) throw InvalidArgument("levels must be strictly increasing");
}

void require_window(double window) {
  if (!(window > 0.0)) throw InvalidArgument("local-time window must be positive");
}

}  // namespace

LocalTimeEstimate occupation_local_time(const Path& path, double level, double window) {
  require_window(window);
  if (!(level >= 0.0)) throw InvalidArgument("local-time level must be nonnegative");
  LocalTimeEstimate est{level, window, path.grid, std::vector<double>(path.values.size())};
  const double unit = path.grid.step() / window;
  std::size_t count = 0;
  for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
    const double x = path.values[k];
    if (x >= level && x < level + window) ++count;
    est.values[k + 1] = unit * static_cast<double>(count);
  }
  return est;
}

std::vector<LocalTimeEstimate> local_time_profile(const Path& path, std::span<const double> levels, double window) {
  require_levels(levels);
  require_window(window);
  std::vector<LocalTimeEstimate> out;
  out.reserve(levels.size());
  for (double a : levels) out.push_back({a, window, path.grid, std::vector<double>(path.values.size())});
  std::vector<std::size_t> counts(levels.size(), 0);
  const double unit = path.grid.step() / window;
  for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
    const double x = path.values[k];
    // Levels a with a <= x < a + window.
    auto hi = std::upper_bound(levels.begin(), levels.end(), x);
    for (auto it = hi; it != levels.begin();) {
      --it;
      if (x >= *it + window) break;
      ++counts[static_cast<std::size_t>(it - levels.begin())];
    }
    for (std::size_t i = 0; i < levels.size(); ++i) out[i].values[k + 1] = unit * static_cast<double>(counts[i]);
  }
  return out;
}

double speed_mass(double beta, double a, double b) {
  if (!(beta > 0.0)) throw InvalidArgument("speed_mass: beta must be positive");
  if (!(a >= 0.0 && b >= a)) throw InvalidArgument("speed_mass: need 0 <= a <= b");
  return (std::pow(b, beta) - std::pow(a, beta)) / beta;
}

LocalTimeEstimate speed_local_time(const Path& path, double level, double window, double beta) {
  auto est = occupation_local_time(path, level, window);
  const double scale = window / speed_mass(beta, level, level + window);
  for (auto& v : est.values) v *= scale;
  return est;
}

double OccupationBalance::residual() const { return std::abs(time_integral - level_integral); }

double OccupationBalance::relative_residual() const {
  const double r = residual();
  if (r == 0.0) return 0.0;
  return r / std::abs(time_integral);
}

OccupationBalance occupation_balance(const Path& path, const std::function<double(double)>& phi, double beta,
                                     std::span<const double> levels, double window) {
  require_levels(levels);
  require_window(window);
  const double h = path.grid.step();
  OccupationBalance b;
  for (std::size_t j = 0; j + 1 < path.values.size(); ++j) b.time_integral += h * phi(path.values[j]);

  // Level integral at the horizon only: count samples per level window.
  std::vector<std::size_t> counts(levels.size(), 0);
  for (std::size_t j = 0; j + 1 < path.values.size(); ++j) {
    const double x = path.values[j];
    auto hi = std::upper_bound(levels.begin(), levels.end(), x);
    for (auto it = hi; it != levels.begin();) {
      --it;
      if (x >= *it + window) break;
      ++counts[static_cast<std::size_t>(it - levels.begin())];
    }
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (counts[i] == 0) continue;
    const double a = levels[i];
    const double da = i + 1 < levels.size() ? levels[i + 1] - a : window;
    const double local = h * static_cast<double>(counts[i]) / speed_mass(beta, a, a + window);
    b.level_integral += phi(a) * local * speed_mass(beta, a, a + da);
  }
  return b;
}

double occupation_identity_residual(const Path& path, const std::function<double(double)>& phi, double beta,
                                    std::span<const double> levels, double window) {
  return occupation_balance(path, phi, beta, levels, window).residual();
}

std::vector<double> geometric_levels(double a_min, double a_max, std::size_t count) {
  if (!(a_min > 0.0 && a_max > a_min) || count == 0) throw InvalidArgument("geometric_levels: need 0 < a_min < a_max");
  std::vector<double> levels(count);
  const double log_ratio = std::log(a_max / a_min) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) levels[i] = a_min * std::exp(log_ratio * static_cast<double>(i));
  return levels;
}

std::vector<double> principal_value_k(const Path& path, double beta, double a_max, std::span<const double> levels,
                                      double window) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("principal_value_k: beta must lie in (0, 1)");
  require_levels(levels);
  require_window(window);
  if (!(levels[0] > 0.0)) throw InvalidArgument("principal_value_k: levels must be positive");
  if (!(a_max > levels.back())) throw InvalidArgument("principal_value_k: a_max must exceed the last level");

  // Per cell [e_i, e_{i+1}): int u^(beta-2) du / int u^(beta-1) du.
  std::vector<double> edges(levels.begin(), levels.end());
  edges.push_back(a_max);
  std::vector<double> weight(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double w = (std::pow(lo, beta - 1.0) - std::pow(hi, beta - 1.0)) / (1.0 - beta);
    weight[i] = w / speed_mass(beta, lo, hi);
  }
  // int_{levels[0]}^inf a^(beta-2) da, multiplying L_0.
  const double l0_weight = std::pow(levels[0], beta - 1.0) / (1.0 - beta);
  const double l0_norm = speed_mass(beta, 0.0, window);

  const double h = path.grid.step();
  std::vector<double> k(path.values.size(), 0.0);
  double level_sum = 0.0;
  std::size_t below_window = 0;
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    const double x = path.values[j];
    if (x >= a_max) throw InvalidArgument("principal_value_k: path exceeds a_max at index " + std::to_string(j));
    if (j + 1 == path.values.size()) break;
    if (x < window) ++below_window;
    if (x >= edges[0]) {
      const auto cell = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
      level_sum += h * weight[cell];
    }
    const double l0 = h * static_cast<double>(below_window) / l0_norm;
    k[j + 1] = level_sum - l0 * l0_weight;
  }
  return k;
}

double zero_time_fraction(const Path& path, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("zero_time_fraction: eta must be positive");
  std::size_t count = 0;
  for (std::size_t j = 0; j + 1 < path.values.size(); ++j)
    if (path.values[j] < eta) ++count;
  return path.grid.step() * static_cast<double>(count) / path.grid.horizon();
}

std::vector<Excursion> excursions_above(const Path& path, double level) {
  std::vector<Excursion> out;
  const auto& x = path.values;
  for (std::size_t j = 0; j < x.size();) {
    if (x[j] <= level) {
      ++j;
      continue;
    }
    std::size_t end = j;
    while (end + 1 < x.size() && x[end + 1] > level) ++end;
    out.push_back({j, end});
    j = end + 1;
  }
  return out;
}

}  // namespace ssde
