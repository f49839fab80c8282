#include "ssde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ssde/bessel.hpp"
#include "ssde/localtime.hpp"
#include "ssde/parallel.hpp"
#include "ssde/schemes.hpp"
#include "ssde/stats.hpp"
#include "ssde/testfn.hpp"
#include "ssde/transforms.hpp"
#include "ssde/verify.hpp"

namespace ssde {

namespace {

// Stream layout: experiment tag in bits 40+, sub-experiment in bits 32-39,
// path index below.
NoiseSource noise_for(std::uint64_t seed, std::uint64_t tag, std::uint64_t sub) {
  return NoiseSource{seed, (tag << 40) | (sub << 32)};
}

NoiseSource path_noise(const NoiseSource& base, std::size_t i) { return base.with_stream(base.stream_index + i); }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double floor_or_sqrt(double delta, double h) { return delta > 0.0 ? delta : std::sqrt(h); }

std::size_t to_size(std::uint64_t v) { return static_cast<std::size_t>(v); }

}  // namespace

void Report::add(std::string check, double statistic, double threshold, bool pass) {
  rows.push_back({std::move(check), statistic, threshold, pass});
}

void Report::append(const Report& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

bool Report::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string report_csv(const Report& report) {
  std::string out = "check_name,statistic,threshold,pass\n";
  for (const auto& r : report.rows)
    out += r.check + "," + format_double(r.statistic) + "," + format_double(r.threshold) + "," + (r.pass ? "1" : "0") + "\n";
  return out;
}

std::string paths_csv(std::span<const Path> paths) {
  std::string out = "path_id,t,x,l\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const Path& p = paths[i];
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      out += std::to_string(i) + "," + format_double(p.grid.time(k)) + "," + format_double(p.values[k]) + ",";
      if (p.reflection) out += format_double((*p.reflection)[k]);
      out += "\n";
    }
  }
  return out;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + file.string());
}

// ---------------------------------------------------------------------------
// simulate

SimulateParams read_simulate(const Config& c, const std::string& s) {
  SimulateParams p;
  p.model = c.get_string(s, "model", p.model);
  p.beta = c.get_double(s, "beta", p.beta);
  p.alpha = c.get_double(s, "alpha", p.alpha);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.scheme = c.get_string(s, "scheme", p.scheme);
  p.h = c.get_double(s, "h", p.h);
  p.horizon = c.get_double(s, "horizon", p.horizon);
  p.delta = c.get_double(s, "delta", p.delta);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  return p;
}

std::vector<Path> simulate_ensemble(const SimulateParams& p, std::uint64_t seed) {
  CoefficientSpec coefficients = CoefficientSpec::unit();
  if (p.model == "bessel") {
    coefficients = CoefficientSpec::bessel(p.beta);
  } else if (p.model == "power") {
    coefficients = CoefficientSpec::power(p.alpha);
  } else if (p.model != "unit") {
    throw InvalidArgument("unknown model '" + p.model + "' (expected bessel, power or unit)");
  }
  const Scheme scheme = scheme_from_string(p.scheme);
  const auto representation = scheme == Scheme::EulerReflected ? Representation::Reflected : Representation::DriftIntegral;
  const SdeProblem problem(p.x0, coefficients, representation);
  const TimeGrid grid = make_grid(p.h, p.horizon);
  SchemeOptions options;
  if (p.delta > 0.0) options.delta = p.delta;

  std::vector<Path> paths(to_size(p.n_paths), Path{grid, {}, std::nullopt});
  const NoiseSource base = noise_for(seed, 0, 0);
  parallel_for(paths.size(), [&](std::size_t i) { paths[i] = simulate(problem, scheme, grid, path_noise(base, i), options); });
  return paths;
}

// ---------------------------------------------------------------------------
// density

DensityParams read_density(const Config& c, const std::string& s) {
  DensityParams p;
  p.betas = c.get_doubles(s, "betas", p.betas);
  p.x0s = c.get_doubles(s, "x0s", p.x0s);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.t = c.get_double(s, "t", p.t);
  p.alpha = c.get_double(s, "alpha", p.alpha);
  return p;
}

Report check_density(const DensityParams& p, std::uint64_t seed) {
  Report report;
  const std::size_t n = to_size(p.n_paths);
  const double threshold = ks_critical_value(n, p.alpha);
  std::uint64_t sub = 0;
  for (double beta : p.betas) {
    const BesselParams params(beta);
    for (double x0 : p.x0s) {
      const NoiseSource base = noise_for(seed, 1, sub++);
      std::vector<double> xs(n);
      parallel_for(n, [&](std::size_t i) { xs[i] = sample_transition(params, p.t, x0, path_noise(base, i)); });
      std::sort(xs.begin(), xs.end());
      const double ks = ks_distance_sorted(xs, transition_cdf_sorted(params, p.t, x0, xs));
      report.add("density_beta=" + short_number(beta) + "_x0=" + short_number(x0), ks, threshold, ks < threshold);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// scheme consistency

ConsistencyParams read_consistency(const Config& c, const std::string& s) {
  ConsistencyParams p;
  p.beta = c.get_double(s, "beta", p.beta);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.h = c.get_double(s, "h", p.h);
  p.delta = c.get_double(s, "delta", p.delta);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.t = c.get_double(s, "t", p.t);
  p.threshold = c.get_double(s, "threshold", p.threshold);
  return p;
}

Report check_consistency(const ConsistencyParams& p, std::uint64_t seed) {
  const SdeProblem problem(p.x0, CoefficientSpec::bessel(p.beta), Representation::DriftIntegral);
  const LawSide exact{Scheme::BesselExact, noise_for(seed, 2, 0), {}};
  const LawSide euler{Scheme::RegularizedDrift, noise_for(seed, 2, 1), {floor_or_sqrt(p.delta, p.h)}};
  const double ks = weak_law_distance(problem, exact, euler, make_grid(p.h, p.t), p.t, to_size(p.n_paths));
  Report report;
  report.add("consistency_beta=" + short_number(p.beta) + "_h=" + short_number(p.h), ks, p.threshold, ks < p.threshold);
  return report;
}

// ---------------------------------------------------------------------------
// occupation formula

OccupationParams read_occupation(const Config& c, const std::string& s) {
  OccupationParams p;
  p.betas = c.get_doubles(s, "betas", p.betas);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.h = c.get_double(s, "h", p.h);
  p.window = c.get_double(s, "window", p.window);
  p.level_max = c.get_double(s, "level_max", p.level_max);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.threshold = c.get_double(s, "threshold", p.threshold);
  return p;
}

Report check_occupation(const OccupationParams& p, std::uint64_t seed) {
  struct Phi {
    const char* name;
    double (*fn)(double);
  };
  static const Phi phis[] = {
      {"one", [](double) { return 1.0; }},
      {"x", [](double x) { return x; }},
      {"indicator", [](double x) { return x >= 0.5 && x < 1.0 ? 1.0 : 0.0; }},
  };
  constexpr std::size_t n_phi = std::size(phis);

  std::vector<double> levels;
  for (std::size_t i = 0; static_cast<double>(i) * p.window < p.level_max; ++i) levels.push_back(static_cast<double>(i) * p.window);
  const TimeGrid grid = make_grid(p.h, 1.0);
  const std::size_t n = to_size(p.n_paths);

  Report report;
  std::uint64_t sub = 0;
  for (double beta : p.betas) {
    const NoiseSource base = noise_for(seed, 3, sub++);
    std::vector<double> lhs(n * n_phi), rhs(n * n_phi);
    parallel_for(n, [&](std::size_t i) {
      const Path path = simulate_bessel_exact(beta, p.x0, grid, path_noise(base, i));
      for (std::size_t j = 0; j < n_phi; ++j) {
        const auto b = occupation_balance(path, phis[j].fn, beta, levels, p.window);
        lhs[j * n + i] = b.time_integral;
        rhs[j * n + i] = b.level_integral;
      }
    });
    for (std::size_t j = 0; j < n_phi; ++j) {
      OccupationBalance total;
      for (std::size_t i = 0; i < n; ++i) {
        total.time_integral += lhs[j * n + i];
        total.level_integral += rhs[j * n + i];
      }
      const double r = total.relative_residual();
      report.add(std::string("occupation_beta=") + short_number(beta) + "_phi=" + phis[j].name, r, p.threshold,
                 r < p.threshold);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// principal value over excursions

ExcursionParams read_excursion(const Config& c, const std::string& s) {
  ExcursionParams p;
  p.beta = c.get_double(s, "beta", p.beta);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.h = c.get_double(s, "h", p.h);
  p.level = c.get_double(s, "level", p.level);
  p.window = c.get_double(s, "window", p.window);
  p.a_max = c.get_double(s, "a_max", p.a_max);
  p.n_levels = c.get_uint(s, "n_levels", p.n_levels);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.threshold = c.get_double(s, "threshold", p.threshold);
  return p;
}

Report check_excursion(const ExcursionParams& p, std::uint64_t seed) {
  const TimeGrid grid = make_grid(p.h, 1.0);
  const auto levels = geometric_levels(1e-4, p.a_max, to_size(p.n_levels));
  const std::size_t n = to_size(p.n_paths);
  const NoiseSource base = noise_for(seed, 4, 0);
  std::vector<double> worst(n, 0.0);
  std::vector<std::size_t> counts(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const Path path = simulate_bessel_exact(p.beta, p.x0, grid, path_noise(base, i));
    const auto k = principal_value_k(path, p.beta, p.a_max, levels, p.window);
    for (const auto& e : excursions_above(path, p.level)) {
      if (e.last + 1 >= path.values.size()) continue;
      double reference = 0.0;
      for (std::size_t j = e.first; j <= e.last; ++j) reference += p.h / path.values[j];
      worst[i] = std::max(worst[i], std::abs(k[e.last + 1] - k[e.first] - reference) / reference);
      ++counts[i];
    }
  });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  const double stat = *std::max_element(worst.begin(), worst.end());
  Report report;
  report.add("k_increment_beta=" + short_number(p.beta) + "_excursions=" + std::to_string(total), stat, p.threshold,
             total > 0 && stat < p.threshold);
  return report;
}

// ---------------------------------------------------------------------------
// zero time at 0

ZeroTimeParams read_zero_time(const Config& c, const std::string& s) {
  ZeroTimeParams p;
  p.beta = c.get_double(s, "beta", p.beta);
  p.h = c.get_double(s, "h", p.h);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.eta = c.get_double(s, "eta", p.eta);
  p.ratio_threshold = c.get_double(s, "ratio_threshold", p.ratio_threshold);
  p.alpha = c.get_double(s, "alpha", p.alpha);
  p.absorbed_paths = c.get_uint(s, "absorbed_paths", p.absorbed_paths);
  return p;
}

Report check_zero_time(const ZeroTimeParams& p, std::uint64_t seed) {
  const TimeGrid grid = make_grid(p.h, 1.0);
  const std::size_t n = to_size(p.n_paths);
  const NoiseSource base = noise_for(seed, 5, 0);
  std::vector<double> coarse(n), fine(n);
  parallel_for(n, [&](std::size_t i) {
    const Path path = simulate_bessel_exact(p.beta, 0.0, grid, path_noise(base, i));
    coarse[i] = zero_time_fraction(path, p.eta);
    fine[i] = zero_time_fraction(path, p.eta / 10.0);
  });
  const double ratio = summarize(fine).mean / summarize(coarse).mean;

  const std::size_t m = to_size(p.absorbed_paths);
  const NoiseSource absorbed_base = noise_for(seed, 5, 1);
  std::vector<double> absorbed(m);
  parallel_for(m, [&](std::size_t i) {
    const Path path = simulate_power_diffusion(p.alpha, 0.0, grid, path_noise(absorbed_base, i), PowerVariant::Absorbed);
    absorbed[i] = zero_time_fraction(path, p.eta / 10.0);
  });
  const double least = m > 0 ? *std::min_element(absorbed.begin(), absorbed.end()) : 0.0;

  Report report;
  report.add("zero_time_ratio_beta=" + short_number(p.beta), ratio, p.ratio_threshold, ratio < p.ratio_threshold);
  report.add("zero_time_absorbed_alpha=" + short_number(p.alpha), least, 1.0, m > 0 && least == 1.0);
  return report;
}

// ---------------------------------------------------------------------------
// martingale increments

MartingaleParams read_martingale(const Config& c, const std::string& s) {
  MartingaleParams p;
  p.betas = c.get_doubles(s, "betas", p.betas);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.h = c.get_double(s, "h", p.h);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.s = c.get_double(s, "s", p.s);
  p.t = c.get_double(s, "t", p.t);
  p.radii = c.get_doubles(s, "radii", p.radii);
  p.threshold = c.get_double(s, "threshold", p.threshold);
  return p;
}

Report check_martingale(const MartingaleParams& p, std::uint64_t seed) {
  const auto family = bump_family(p.radii);
  const TimeGrid grid = make_grid(p.h, p.t);
  Report report;
  std::uint64_t sub = 0;
  for (double beta : p.betas) {
    const NoiseSource base = noise_for(seed, 6, sub++);
    const auto stats = martingale_increment_stats(
        to_size(p.n_paths), [&](std::size_t i) { return simulate_bessel_exact(beta, p.x0, grid, path_noise(base, i)); },
        family, CoefficientSpec::bessel(beta), p.s, p.t);
    for (std::size_t j = 0; j < stats.size(); ++j) {
      const double z = stats[j].max_abs();
      report.add("martingale_beta=" + short_number(beta) + "_r=" + short_number(p.radii[j]), z, p.threshold,
                 z < p.threshold);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// reduction to reflected Brownian motion

ReductionParams read_reduction(const Config& c, const std::string& s) {
  ReductionParams p;
  p.betas = c.get_doubles(s, "betas", p.betas);
  p.delta = c.get_double(s, "delta", p.delta);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.h = c.get_double(s, "h", p.h);
  p.chunk = c.get_double(s, "chunk", p.chunk);
  p.new_time = c.get_double(s, "new_time", p.new_time);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.threshold = c.get_double(s, "threshold", p.threshold);
  return p;
}

namespace {

double reduced_value(const ReductionParams& p, double beta, const ScaleTransform& transform, const NoiseSource& noise) {
  constexpr int kMaxChunks = 64;
  Stream stream = noise.stream();
  const TimeGrid chunk = make_grid(p.h, p.chunk);
  Path path = simulate_bessel_exact(beta, p.x0, chunk, stream);
  for (int i = 1;; ++i) {
    try {
      const auto v = reduce_to_reflected(path, transform, p.delta);
      if (v.grid.horizon() >= p.new_time) return v.value_at(p.new_time);
    } catch (const ReductionError&) {
      // Too few samples above delta so far.
    }
    if (i >= kMaxChunks) throw ReductionError("clock did not reach " + short_number(p.new_time));
    const Path more = simulate_bessel_exact(beta, path.values.back(), chunk, stream);
    path.values.insert(path.values.end(), more.values.begin() + 1, more.values.end());
    path.grid = TimeGrid(p.h, path.grid.n_steps() + chunk.n_steps());
  }
}

}  // namespace

Report check_reduction(const ReductionParams& p, std::uint64_t seed) {
  Report report;
  const std::size_t n = to_size(p.n_paths);
  std::uint64_t sub = 0;
  for (double beta : p.betas) {
    const auto transform = build_scale(CoefficientSpec::bessel(beta));
    const double v0 = transform.s(p.x0), level = transform.s(p.delta), sd = std::sqrt(p.new_time);
    const NoiseSource base = noise_for(seed, 7, sub++);
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t i) { values[i] = reduced_value(p, beta, transform, path_noise(base, i)); });
    const double ks = ks_distance(values, [&](double y) {
      if (y < level) return 0.0;
      return normal_cdf((y - v0) / sd) - normal_cdf((2.0 * level - y - v0) / sd);
    });
    report.add("reduction_beta=" + short_number(beta) + "_delta=" + short_number(p.delta), ks, p.threshold,
               ks < p.threshold);
  }
  return report;
}

// ---------------------------------------------------------------------------
// max-solution closure

MaxSolutionParams read_max_solution(const Config& c, const std::string& s) {
  MaxSolutionParams p;
  p.beta = c.get_double(s, "beta", p.beta);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.h = c.get_double(s, "h", p.h);
  p.delta = c.get_double(s, "delta", p.delta);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  p.s = c.get_double(s, "s", p.s);
  p.t = c.get_double(s, "t", p.t);
  p.radii = c.get_doubles(s, "radii", p.radii);
  p.threshold = c.get_double(s, "threshold", p.threshold);
  return p;
}

Report check_max_solution(const MaxSolutionParams& p, std::uint64_t seed) {
  const SdeProblem problem(p.x0, CoefficientSpec::bessel(p.beta), Representation::DriftIntegral);
  const auto family = bump_family(p.radii);
  MaxSolutionOptions options;
  options.grid = make_grid(p.h, p.t);
  options.n_paths = to_size(p.n_paths);
  options.s = p.s;
  options.t = p.t;
  const auto result = max_solution_residual(problem, noise_for(seed, 8, 0), floor_or_sqrt(p.delta, p.h), family, options);
  Report report;
  for (std::size_t j = 0; j < result.stats.size(); ++j) {
    const double z = result.stats[j].max_abs();
    report.add("max_solution_beta=" + short_number(p.beta) + "_r=" + short_number(p.radii[j]), z, p.threshold,
               z < p.threshold);
  }
  return report;
}

// ---------------------------------------------------------------------------
// pathwise gaps

GapParams read_gap(const Config& c, const std::string& s) {
  GapParams p;
  p.beta = c.get_double(s, "beta", p.beta);
  p.x0 = c.get_double(s, "x0", p.x0);
  p.steps = c.get_doubles(s, "steps", p.steps);
  p.n_paths = c.get_uint(s, "n_paths", p.n_paths);
  return p;
}

Report check_gap(const GapParams& p, std::uint64_t seed) {
  if (p.steps.empty()) throw InvalidArgument("gap check needs at least one step");
  const SdeProblem problem(p.x0, CoefficientSpec::bessel(p.beta), Representation::DriftIntegral);
  GapOptions options;
  options.n_paths = to_size(p.n_paths);
  const NoiseSource noise = noise_for(seed, 9, 0);

  std::vector<double> medians;
  for (double h : p.steps) {
    const std::vector<double> pair{h, h / 2.0};
    medians.push_back(pathwise_uniqueness_gap(problem, Scheme::RegularizedDrift, noise, pair, options).at(0));
  }
  Report report;
  for (std::size_t i = 0; i < medians.size(); ++i)
    report.add("gap_median_h=" + short_number(p.steps[i]), medians[i], i == 0 ? medians[i] : medians[i - 1],
               i == 0 || medians[i] < medians[i - 1]);
  const std::vector<double> same{p.steps[0], p.steps[0]};
  const double zero = pathwise_uniqueness_gap(problem, Scheme::RegularizedDrift, noise, same, options).at(0);
  report.add("gap_identical_h=" + short_number(p.steps[0]), zero, 0.0, zero == 0.0);
  return report;
}

// ---------------------------------------------------------------------------
// commands

const std::vector<std::string>& check_commands() {
  static const std::vector<std::string> names{"check-density", "check-martingale", "check-localtime", "check-transform",
                                              "check-uniqueness"};
  return names;
}

std::vector<std::string> command_sections(const std::string& command) {
  if (command == "simulate") return {"simulate"};
  if (command == "check-density") return {"density"};
  if (command == "check-martingale") return {"martingale"};
  if (command == "check-localtime") return {"occupation", "excursion", "zero_time"};
  if (command == "check-transform") return {"reduction"};
  if (command == "check-uniqueness") return {"consistency", "max_solution", "gap"};
  throw InvalidArgument("unknown command '" + command + "'");
}

Report run_command(const std::string& command, const Config& cfg, std::uint64_t seed) {
  Report report;
  if (command == "check-density") {
    report.append(check_density(read_density(cfg, "density"), seed));
  } else if (command == "check-martingale") {
    report.append(check_martingale(read_martingale(cfg, "martingale"), seed));
  } else if (command == "check-localtime") {
    report.append(check_occupation(read_occupation(cfg, "occupation"), seed));
    report.append(check_excursion(read_excursion(cfg, "excursion"), seed));
    report.append(check_zero_time(read_zero_time(cfg, "zero_time"), seed));
  } else if (command == "check-transform") {
    report.append(check_reduction(read_reduction(cfg, "reduction"), seed));
  } else if (command == "check-uniqueness") {
    report.append(check_consistency(read_consistency(cfg, "consistency"), seed));
    report.append(check_max_solution(read_max_solution(cfg, "max_solution"), seed));
    report.append(check_gap(read_gap(cfg, "gap"), seed));
  } else {
    throw InvalidArgument("unknown command '" + command + "'");
  }
  return report;
}

}  // namespace ssde
