#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssde/localtime.hpp"
#include "ssde/stats.hpp"
#include "ssde/verify.hpp"

using namespace ssde;

namespace {

const std::vector<double> kRadii{0.1, 0.15, 0.2, 0.3, 0.5};

// Absorbed at 0: frozen from the first zero on.
Path absorb(Path p) {
  auto it = std::find(p.values.begin(), p.values.end(), 0.0);
  std::fill(it, p.values.end(), 0.0);
  p.reflection.reset();
  return p;
}

}  // namespace

TEST_CASE("sup_gap") {
  const SdeProblem p(1.0, CoefficientSpec::unit(), Representation::Reflected);
  const auto fine_grid = make_grid(0.025, 1.0);
  const auto dw = sample_brownian(fine_grid, NoiseSource{40, 0});
  const auto fine = simulate_euler_reflected(p, fine_grid, dw);
  CHECK(sup_gap(fine, fine) == 0.0);

  const auto mid = aggregate_pairs(dw);
  const auto coarse_dw = aggregate_pairs(mid);
  const auto coarse = simulate_euler_reflected(p, make_grid(0.1, 1.0), coarse_dw);
  double expected = 0.0;
  for (std::size_t k = 0; k < coarse.values.size(); ++k)
    expected = std::max(expected, std::abs(coarse.values[k] - fine.values[4 * k]));
  CHECK(sup_gap(coarse, fine) == expected);
  CHECK(expected > 0.0);

  CHECK_THROWS_AS(sup_gap(coarse, simulate_euler_reflected(p, make_grid(0.03, 1.0), NoiseSource{40, 1})), InvalidArgument);
  CHECK_THROWS_AS(sup_gap(coarse, simulate_euler_reflected(p, make_grid(0.025, 2.0), NoiseSource{40, 1})), InvalidArgument);
}

TEST_CASE("coarse increments are exact sums of fine increments") {
  const auto fine = sample_brownian(make_grid(1e-3, 1.0), NoiseSource{41, 3});
  const auto coarse = aggregate_pairs(fine);
  REQUIRE(coarse.size() * 2 == fine.size());
  for (std::size_t k = 0; k < coarse.size(); ++k) CHECK(coarse[k] == fine[2 * k] + fine[2 * k + 1]);
}

TEST_CASE("deterministic Lipschitz drift: gaps shrink at first order") {
  const SdeProblem p(1.0, CoefficientSpec::custom([](double x) { return -x; }, [](double) { return 0.0; }),
                     Representation::Reflected);
  const std::vector<double> hs{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  GapOptions opt;
  opt.n_paths = 1;
  const auto gaps = pathwise_uniqueness_gap(p, Scheme::EulerReflected, NoiseSource{42, 0}, hs, opt);
  REQUIRE(gaps.size() == 3);

  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double h = hs[i];
    double oracle = 0.0;
    for (int k = 0; k <= static_cast<int>(std::lround(1.0 / h)); ++k)
      oracle = std::max(oracle, std::abs(std::pow(1.0 - h, k) - std::pow(1.0 - h / 2.0, 2 * k)));
    CHECK(gaps[i] == doctest::Approx(oracle).epsilon(1e-10));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(std::abs(gaps[i] / gaps[i - 1] - 0.5) < 0.15);
}

TEST_CASE("Bessel beta = 3: median gap decreases under refinement") {
  const SdeProblem p(1.0, CoefficientSpec::bessel(3.0), Representation::DriftIntegral);
  std::vector<double> medians;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const std::vector<double> pair{h, h / 2.0};
    medians.push_back(pathwise_uniqueness_gap(p, Scheme::RegularizedDrift, NoiseSource{43, 0}, pair).at(0));
  }
  CHECK(medians[0] > medians[1]);
  CHECK(medians[1] > medians[2]);
  CHECK(medians[2] > 0.0);
}

TEST_CASE("identical steps give a zero gap") {
  const SdeProblem p(1.0, CoefficientSpec::bessel(3.0), Representation::DriftIntegral);
  const std::vector<double> same{1e-2, 1e-2};
  GapOptions opt;
  opt.n_paths = 32;
  CHECK(pathwise_uniqueness_gap(p, Scheme::RegularizedDrift, NoiseSource{44, 0}, same, opt).at(0) == 0.0);
}

TEST_CASE("pathwise_uniqueness_gap rejects bad inputs") {
  const SdeProblem p(1.0, CoefficientSpec::bessel(3.0), Representation::DriftIntegral);
  const std::vector<double> decade{1e-2, 1e-3};
  const std::vector<double> quarter{1e-2, 2.5e-3};
  const std::vector<double> single{1e-2};
  const std::vector<double> halves{1e-2, 5e-3};
  CHECK_THROWS_AS(pathwise_uniqueness_gap(p, Scheme::RegularizedDrift, NoiseSource{}, decade), InvalidArgument);
  CHECK_THROWS_AS(pathwise_uniqueness_gap(p, Scheme::RegularizedDrift, NoiseSource{}, quarter), InvalidArgument);
  CHECK_THROWS_AS(pathwise_uniqueness_gap(p, Scheme::RegularizedDrift, NoiseSource{}, single), InvalidArgument);
  CHECK_THROWS_AS(pathwise_uniqueness_gap(p, Scheme::BesselExact, NoiseSource{}, halves), InvalidArgument);
}

TEST_CASE("max path of two reflected solutions") {
  const SdeProblem p(0.1, CoefficientSpec::bessel(1.5), Representation::Reflected);
  const auto grid = make_grid(1e-3, 1.0);
  const auto dw = sample_brownian(grid, NoiseSource{45, 0});
  const auto a = simulate_euler_reflected(p, grid, dw, 0.05);
  const auto b = simulate_euler_reflected(p, grid, dw, 0.01);
  const auto m = max_path(a, b);
  REQUIRE(m.reflection.has_value());
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    CHECK(m.values[k] >= 0.0);
    CHECK(m.values[k] == std::max(a.values[k], b.values[k]));
    if (k > 0) CHECK((*m.reflection)[k] >= (*m.reflection)[k - 1]);
  }
  CHECK((*m.reflection)[0] == 0.0);
  CHECK_FALSE(max_path(a, absorb(b)).reflection.has_value());
  CHECK_THROWS_AS(max_path(a, simulate_euler_reflected(p, make_grid(2e-3, 1.0), NoiseSource{45, 1})), InvalidArgument);
}

TEST_CASE("max of a solution with itself reproduces its statistics") {
  const SdeProblem p(0.5, CoefficientSpec::bessel(1.5), Representation::DriftIntegral);
  const auto family = bump_family(kRadii);
  MaxSolutionOptions opt;
  opt.grid = make_grid(1e-2, 1.0);
  const NoiseSource noise{46, 0};
  auto single = [&](std::size_t i) { return simulate_regularized_drift(p, opt.grid, noise.with_stream(i), 0.05); };
  const auto report = max_solution_residual(200, [&](std::size_t i) { return std::pair{single(i), single(i)}; }, family,
                                            p.coefficients, opt);
  const auto direct = martingale_increment_stats(200, single, family, p.coefficients, opt.s, opt.t);
  REQUIRE(report.stats.size() == direct.size());
  for (std::size_t j = 0; j < direct.size(); ++j) {
    CHECK(report.stats[j].z == direct[j].z);
    CHECK(report.stats[j].mean == direct[j].mean);
    CHECK(report.stats[j].z_conditional == direct[j].z_conditional);
  }
}

TEST_CASE("max of two regularized Bessel solutions passes the martingale check") {
  const SdeProblem p(0.5, CoefficientSpec::bessel(1.5), Representation::DriftIntegral);
  const auto family = bump_family(kRadii);
  const auto report = max_solution_residual(p, NoiseSource{47, 0}, 0.05, family);
  CHECK(report.stats.size() == family.size());
  CHECK(report.max_abs_statistic < 4.0);
  CHECK_FALSE(report.zero_time_flagged);
}

TEST_CASE("a pair of absorbed solutions is flagged by the zero-time check") {
  const SdeProblem p(0.2, CoefficientSpec::power(0.25), Representation::DriftIntegral);
  MaxSolutionOptions opt;
  opt.n_paths = 1000;
  const auto family = bump_family(kRadii);
  const NoiseSource noise{48, 0};

  const auto absorbed = max_solution_residual(
      opt.n_paths,
      [&](std::size_t i) {
        const auto dw = sample_brownian(opt.grid, noise.with_stream(i));
        return std::pair{simulate_power_diffusion(0.25, p.x0, opt.grid, dw, PowerVariant::Absorbed),
                         absorb(simulate_regularized_drift(p, opt.grid, dw, 0.05))};
      },
      family, p.coefficients, opt);
  CHECK(absorbed.zero_time_flagged);
  CHECK(absorbed.zero_time_fine > 0.3);

  const auto regular = max_solution_residual(p, noise, 0.01, family, opt);
  CHECK_FALSE(regular.zero_time_flagged);
}

TEST_CASE("weak_law_distance") {
  const SdeProblem p(1.0, CoefficientSpec::bessel(2.0), Representation::DriftIntegral);
  const auto grid = make_grid(1e-2, 1.0);
  const LawSide a{Scheme::BesselExact, NoiseSource{49, 0}, {}};
  const LawSide b{Scheme::BesselExact, NoiseSource{50, 0}, {}};

  SUBCASE("too few paths") { CHECK_THROWS_AS(weak_law_distance(p, a, b, grid, 1.0, 999), InsufficientSample); }
  SUBCASE("identical inputs give 0") { CHECK(weak_law_distance(p, a, a, grid, 1.0, 1000) == 0.0); }
  SUBCASE("symmetric") {
    const LawSide e{Scheme::RegularizedDrift, NoiseSource{51, 0}, {}};
    CHECK(weak_law_distance(p, a, e, grid, 1.0, 2000) == weak_law_distance(p, e, a, grid, 1.0, 2000));
  }
  SUBCASE("same scheme, independent noise") {
    const std::size_t n = 100000;
    CHECK(weak_law_distance(p, a, b, grid, 1.0, n) < 1.63 * std::sqrt(2.0 / n));
  }
  SUBCASE("sticky-free and absorbed power diffusions have distinct laws") {
    const SdeProblem q(0.0, CoefficientSpec::power(0.25), Representation::PureDiffusion);
    const LawSide sticky{Scheme::PowerStickyFree, NoiseSource{52, 0}, {}};
    const LawSide absorbed{Scheme::PowerAbsorbed, NoiseSource{53, 0}, {}};
    CHECK(weak_law_distance(q, sticky, absorbed, make_grid(1e-4, 1.0), 1.0, 1000) > 0.95);
  }
}
