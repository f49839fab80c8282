// The end-to-end checks shared by the command-line tool and the acceptance
// run, with their report and CSV formats.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ssde/config.hpp"
#include "ssde/core.hpp"

namespace ssde {

struct ReportRow {
  std::string check;
  double statistic;
  double threshold;
  bool pass;
};

struct Report {
  std::vector<ReportRow> rows;

  void add(std::string check, double statistic, double threshold, bool pass);
  void append(const Report& other);
  bool all_pass() const;
};

/// 17 significant digits, shortest exponent form ("%.17g").
std::string format_double(double v);

/// check_name,statistic,threshold,pass
std::string report_csv(const Report& report);

/// path_id,t,x,l with l empty when the path has no reflection term.
std::string paths_csv(std::span<const Path> paths);

/// Throws IoError when the file cannot be written.
void write_text_file(const std::filesystem::path& file, const std::string& text);

// Every experiment reads its parameters from its own config section, keys
// named as the fields below, and falls back to the defaults shown.

struct SimulateParams {
  std::string model = "bessel";  ///< bessel, power or unit
  double beta = 2.0;
  double alpha = 0.25;
  double x0 = 1.0;
  std::string scheme = "regularized";  ///< euler_reflected, regularized, bessel_exact, power_sticky, power_absorbed
  double h = 1e-2;
  double horizon = 1.0;
  double delta = 0.0;  ///< 0 selects sqrt(h)
  std::uint64_t n_paths = 10;
};
SimulateParams read_simulate(const Config& cfg, const std::string& section);
std::vector<Path> simulate_ensemble(const SimulateParams& p, std::uint64_t seed);

/// Exact-sampler marginals against the closed-form transition law.
struct DensityParams {
  std::vector<double> betas{0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<double> x0s{0.0, 1.0};
  std::uint64_t n_paths = 100000;
  double t = 1.0;
  double alpha = 0.01;
};
DensityParams read_density(const Config& cfg, const std::string& section);
Report check_density(const DensityParams& p, std::uint64_t seed);

/// Regularized-drift Euler against the exact sampler (two-sample KS).
struct ConsistencyParams {
  double beta = 1.5;
  double x0 = 1.0;
  double h = 1e-4;
  double delta = 0.0;  ///< 0 selects sqrt(h)
  std::uint64_t n_paths = 100000;
  double t = 1.0;
  double threshold = 0.015;
};
ConsistencyParams read_consistency(const Config& cfg, const std::string& section);
Report check_consistency(const ConsistencyParams& p, std::uint64_t seed);

/// Ensemble relative residual of the occupation formula for phi = 1, x and
/// the indicator of [0.5, 1).
struct OccupationParams {
  std::vector<double> betas{0.5, 1.5};
  double x0 = 1.0;
  double h = 1e-4;
  double window = 1e-2;
  double level_max = 10.0;
  std::uint64_t n_paths = 1000;
  double threshold = 0.05;
};
OccupationParams read_occupation(const Config& cfg, const std::string& section);
Report check_occupation(const OccupationParams& p, std::uint64_t seed);

/// Largest relative error of k(t2) - k(t1) against h sum 1/x over the
/// completed excursions above `level`.
struct ExcursionParams {
  double beta = 0.5;
  double x0 = 1.0;
  double h = 1e-4;
  double level = 0.05;
  double window = 0.01;
  double a_max = 50.0;
  std::uint64_t n_levels = 200;
  std::uint64_t n_paths = 100;
  double threshold = 0.05;
};
ExcursionParams read_excursion(const Config& cfg, const std::string& section);
Report check_excursion(const ExcursionParams& p, std::uint64_t seed);

/// Zero-time fractions: halving for the Bessel ensemble, 1 for the absorbed one.
struct ZeroTimeParams {
  double beta = 0.5;
  double h = 1e-4;
  std::uint64_t n_paths = 1000;
  double eta = 0.1;
  double ratio_threshold = 0.5;
  double alpha = 0.25;
  std::uint64_t absorbed_paths = 100;
};
ZeroTimeParams read_zero_time(const Config& cfg, const std::string& section);
Report check_zero_time(const ZeroTimeParams& p, std::uint64_t seed);

/// Martingale increments of exact Bessel paths over a bump family.
struct MartingaleParams {
  std::vector<double> betas{0.5, 1.5};
  double x0 = 0.5;
  double h = 1e-3;
  std::uint64_t n_paths = 100000;
  double s = 0.25;
  double t = 1.0;
  std::vector<double> radii{0.1, 0.15, 0.2, 0.3, 0.5};
  double threshold = 4.0;
};
MartingaleParams read_martingale(const Config& cfg, const std::string& section);
Report check_martingale(const MartingaleParams& p, std::uint64_t seed);

/// Scale-and-clock reduction against the law of Brownian motion reflected
/// at s(delta). Paths are extended until the new clock passes `new_time`.
struct ReductionParams {
  std::vector<double> betas{1.2, 1.5, 1.8};
  double delta = 0.1;
  double x0 = 1.0;
  double h = 1e-4;
  double chunk = 2.0;
  double new_time = 0.5;
  std::uint64_t n_paths = 10000;
  double threshold = 0.02;
};
ReductionParams read_reduction(const Config& cfg, const std::string& section);
Report check_reduction(const ReductionParams& p, std::uint64_t seed);

/// Martingale check on the max of two shared-noise regularizations.
struct MaxSolutionParams {
  double beta = 1.5;
  double x0 = 0.5;
  double h = 1e-3;
  double delta = 0.0;  ///< 0 selects sqrt(h); the pair uses delta and delta / 2
  std::uint64_t n_paths = 10000;
  double s = 0.25;
  double t = 1.0;
  std::vector<double> radii{0.1, 0.15, 0.2, 0.3, 0.5};
  double threshold = 4.0;
};
MaxSolutionParams read_max_solution(const Config& cfg, const std::string& section);
Report check_max_solution(const MaxSolutionParams& p, std::uint64_t seed);

/// Median sup-gaps between steps h and h/2 (must strictly decrease over the
/// listed h) and the gap of identical inputs (must be 0).
struct GapParams {
  double beta = 3.0;
  double x0 = 1.0;
  std::vector<double> steps{1e-2, 1e-3, 1e-4};
  std::uint64_t n_paths = 256;
};
GapParams read_gap(const Config& cfg, const std::string& section);
Report check_gap(const GapParams& p, std::uint64_t seed);

/// Names accepted by run_command.
const std::vector<std::string>& check_commands();

/// Config sections read by a command (simulate included): one per experiment,
/// named density, consistency, occupation, excursion, zero_time, martingale,
/// reduction, max_solution, gap and simulate.
std::vector<std::string> command_sections(const std::string& command);

/// Runs every experiment behind a check-* command. Throws InvalidArgument for
/// an unknown command.
Report run_command(const std::string& command, const Config& cfg, std::uint64_t seed);

}  // namespace ssde
