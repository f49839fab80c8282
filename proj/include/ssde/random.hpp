// Counter-based random streams. A (seed, stream_index) pair names an
// independent stream whose output does not depend on which thread draws it
// or in what order streams are consumed.
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ssde/core.hpp"

namespace ssde {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Sequential reader over one Philox stream. Satisfies UniformRandomBitGenerator,
/// so it plugs into the <random> distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();  ///< in [0, 1) with 53 random bits
  double normal() { return normal_(*this); }
  double gamma(double shape);
  std::int64_t poisson(double mean);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // 64-bit words consumed from buffer_ is used_/2
  std::normal_distribution<double> normal_;
};

struct NoiseSource {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  Stream stream() const { return Stream(seed, stream_index); }
  NoiseSource with_stream(std::uint64_t index) const { return {seed, index}; }
};

/// Brownian increments over every step of `grid`, each N(0, step).
std::vector<double> sample_brownian(const TimeGrid& grid, const NoiseSource& noise);

/// Sums consecutive pairs: the increments of the grid with twice the step
/// driven by the same Brownian path. Requires an even count.
std::vector<double> aggregate_pairs(const std::vector<double>& fine);

}  // namespace ssde
