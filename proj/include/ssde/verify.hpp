// Uniqueness experiments: pathwise gaps under refinement, closure of the
// solution class under pointwise maxima, and agreement of marginal laws.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ssde/core.hpp"
#include "ssde/random.hpp"
#include "ssde/schemes.hpp"
#include "ssde/testfn.hpp"

namespace ssde {

/// max_k |coarse(t_k) - fine(t_k)| over the times of the coarser grid. The
/// finer step must divide the coarser one by a power of two (or be equal) and
/// both grids must share the horizon.
double sup_gap(const Path& coarse, const Path& fine);

struct GapOptions {
  double horizon = 1.0;
  std::size_t n_paths = 256;
  SchemeOptions scheme_options;
};

/// Median over `n_paths` paths of sup_gap between the solutions on consecutive
/// steps of `h_sequence`, all driven by one Brownian path per ensemble member
/// (increments sampled on the finest grid and summed in pairs upwards). Each
/// step must be half the previous one, or equal to it. Path i draws from
/// stream noise.stream_index + i.
std::vector<double> pathwise_uniqueness_gap(const SdeProblem& problem, Scheme scheme, const NoiseSource& noise,
                                            std::span<const double> h_sequence, const GapOptions& options = {});

/// Pointwise maximum. A reflection term is kept, as the pointwise maximum of
/// the two, when both inputs carry one.
Path max_path(const Path& a, const Path& b);

struct MaxSolutionOptions {
  TimeGrid grid = make_grid(1e-3, 1.0);
  std::size_t n_paths = 10000;
  double s = 0.25;
  double t = 1.0;
  /// Zero-time check at eta and eta / 10.
  double eta = 0.1;
};

struct MaxSolutionReport {
  std::vector<MartingaleStat> stats;
  double max_abs_statistic = 0.0;
  double zero_time_coarse = 0.0;  ///< ensemble mean of zero_time_fraction(eta)
  double zero_time_fine = 0.0;    ///< same at eta / 10
  /// The occupation of [0, eta) did not at least halve when eta shrank tenfold:
  /// the max path appears to spend positive time at 0.
  bool zero_time_flagged = false;
};

/// Martingale and zero-time statistics of the ensemble x1 v x2, where
/// make_pair(i) returns the i-th pair of solutions driven by shared noise.
MaxSolutionReport max_solution_residual(std::size_t n_paths,
                                        const std::function<std::pair<Path, Path>(std::size_t)>& make_pair,
                                        std::span<const TestFunction> family, const CoefficientSpec& coefficients,
                                        const MaxSolutionOptions& options);

/// The pair is the regularized-drift Euler solution with regularization
/// `delta` and with delta / 2, both from problem.x0 on the same increments.
MaxSolutionReport max_solution_residual(const SdeProblem& problem, const NoiseSource& noise, double delta,
                                        std::span<const TestFunction> family, const MaxSolutionOptions& options = {});

struct LawSide {
  Scheme scheme;
  NoiseSource noise;
  SchemeOptions options;
};

/// Two-sample KS distance between the marginals at time t of the two schemes,
/// n_paths each. The exact Bessel sampler jumps straight to t instead of
/// walking the grid. Throws InsufficientSample when n_paths < 1000.
double weak_law_distance(const SdeProblem& problem, const LawSide& a, const LawSide& b, const TimeGrid& grid, double t,
                         std::size_t n_paths);

}  // namespace ssde
