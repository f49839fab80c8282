#include "ssde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssde/localtime.hpp"
#include "ssde/parallel.hpp"
#include "ssde/stats.hpp"

namespace ssde {

namespace {

// Number of halvings from `coarse` to `fine`, or throws.
std::size_t halvings(double coarse, double fine) {
  for (std::size_t m = 0; m < 64; ++m) {
    const double candidate = std::ldexp(coarse, -static_cast<int>(m));
    if (std::abs(candidate - fine) <= 1e-12 * fine) return m;
    if (candidate < fine) break;
  }
  throw InvalidArgument("steps " + std::to_string(coarse) + " and " + std::to_string(fine) +
                        " are not related by a power of two");
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

}  // namespace

double sup_gap(const Path& coarse, const Path& fine) {
  const std::size_t m = halvings(coarse.grid.step(), fine.grid.step());
  const std::size_t stride = std::size_t{1} << m;
  if (fine.grid.n_steps() != coarse.grid.n_steps() * stride) throw InvalidArgument("sup_gap: grids cover different horizons");
  double gap = 0.0;
  for (std::size_t k = 0; k < coarse.values.size(); ++k)
    gap = std::max(gap, std::abs(coarse.values[k] - fine.values[k * stride]));
  return gap;
}

std::vector<double> pathwise_uniqueness_gap(const SdeProblem& problem, Scheme scheme, const NoiseSource& noise,
                                            std::span<const double> h_sequence, const GapOptions& options) {
  if (h_sequence.size() < 2) throw InvalidArgument("pathwise_uniqueness_gap needs at least two steps");
  for (double h : h_sequence)
    if (!(h > 0.0)) throw InvalidArgument("steps must be positive");
  for (std::size_t i = 1; i < h_sequence.size(); ++i) {
    const std::size_t m = halvings(h_sequence[i - 1], h_sequence[i]);
    if (m > 1) throw InvalidArgument("each step must be half the previous one (or equal to it)");
  }
  if (!scheme_uses_increments(scheme))
    throw InvalidArgument("scheme " + to_string(scheme) + " cannot share Brownian increments");
  if (options.n_paths == 0) throw InvalidArgument("pathwise_uniqueness_gap needs at least one path");

  const std::size_t levels = h_sequence.size();
  const std::size_t coarse_steps = make_grid(h_sequence[0], options.horizon).n_steps();
  std::vector<TimeGrid> grids;
  for (std::size_t i = 0; i < levels; ++i)
    grids.emplace_back(h_sequence[i], coarse_steps << halvings(h_sequence[0], h_sequence[i]));

  std::vector<double> gaps((levels - 1) * options.n_paths);
  parallel_for(options.n_paths, [&](std::size_t p) {
    std::vector<std::vector<double>> dw(levels);
    dw[levels - 1] = sample_brownian(grids[levels - 1], noise.with_stream(noise.stream_index + p));
    for (std::size_t i = levels - 1; i-- > 0;)
      dw[i] = grids[i].n_steps() == grids[i + 1].n_steps() ? dw[i + 1] : aggregate_pairs(dw[i + 1]);
    Path previous = simulate(problem, scheme, grids[0], dw[0], options.scheme_options);
    for (std::size_t i = 1; i < levels; ++i) {
      Path next = simulate(problem, scheme, grids[i], dw[i], options.scheme_options);
      gaps[(i - 1) * options.n_paths + p] = sup_gap(previous, next);
      previous = std::move(next);
    }
  });

  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < levels; ++i)
    out.push_back(median(std::vector<double>(gaps.begin() + static_cast<std::ptrdiff_t>(i * options.n_paths),
                                             gaps.begin() + static_cast<std::ptrdiff_t>((i + 1) * options.n_paths))));
  return out;
}

Path max_path(const Path& a, const Path& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("max_path: paths live on different grids");
  Path out{a.grid, std::vector<double>(a.values.size()), std::nullopt};
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = std::max(a.values[k], b.values[k]);
  if (a.reflection && b.reflection) {
    std::vector<double> l(a.values.size());
    for (std::size_t k = 0; k < l.size(); ++k) l[k] = std::max((*a.reflection)[k], (*b.reflection)[k]);
    out.reflection = std::move(l);
  }
  return out;
}

MaxSolutionReport max_solution_residual(std::size_t n_paths,
                                        const std::function<std::pair<Path, Path>(std::size_t)>& make_pair,
                                        std::span<const TestFunction> family, const CoefficientSpec& coefficients,
                                        const MaxSolutionOptions& options) {
  if (!(options.eta > 0.0)) throw InvalidArgument("eta must be positive");
  std::vector<double> coarse(n_paths), fine(n_paths);
  auto make_max = [&](std::size_t i) {
    const auto [a, b] = make_pair(i);
    Path m = max_path(a, b);
    coarse[i] = zero_time_fraction(m, options.eta);
    fine[i] = zero_time_fraction(m, options.eta / 10.0);
    return m;
  };

  MaxSolutionReport report;
  report.stats = martingale_increment_stats(n_paths, make_max, family, coefficients, options.s, options.t);
  for (const auto& st : report.stats) report.max_abs_statistic = std::max(report.max_abs_statistic, st.max_abs());
  report.zero_time_coarse = summarize(coarse).mean;
  report.zero_time_fine = summarize(fine).mean;
  report.zero_time_flagged = report.zero_time_coarse > 0.0 && report.zero_time_fine >= 0.5 * report.zero_time_coarse;
  return report;
}

MaxSolutionReport max_solution_residual(const SdeProblem& problem, const NoiseSource& noise, double delta,
                                        std::span<const TestFunction> family, const MaxSolutionOptions& options) {
  if (!(delta > 0.0)) throw InvalidArgument("regularization delta must be positive");
  const auto make_pair = [&](std::size_t i) {
    const auto dw = sample_brownian(options.grid, noise.with_stream(noise.stream_index + i));
    return std::pair{simulate_regularized_drift(problem, options.grid, dw, delta),
                     simulate_regularized_drift(problem, options.grid, dw, delta / 2.0)};
  };
  return max_solution_residual(options.n_paths, make_pair, family, problem.coefficients, options);
}

double weak_law_distance(const SdeProblem& problem, const LawSide& a, const LawSide& b, const TimeGrid& grid, double t,
                         std::size_t n_paths) {
  if (n_paths < 1000)
    throw InsufficientSample("weak_law_distance needs at least 1000 paths, got " + std::to_string(n_paths));
  const std::size_t k = grid.index_of(t);
  const auto marginals = [&](const LawSide& side) {
    const bool exact = side.scheme == Scheme::BesselExact && t > 0.0;
    const TimeGrid g = exact ? TimeGrid(t, 1) : grid;
    const std::size_t at = exact ? 1 : k;
    std::vector<double> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
      const NoiseSource noise = side.noise.with_stream(side.noise.stream_index + i);
      out[i] = simulate(problem, side.scheme, g, noise, side.options).values[at];
    });
    return out;
  };
  return ks_two_sample(marginals(a), marginals(b));
}

}  // namespace ssde
