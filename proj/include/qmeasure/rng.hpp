#pragma once

#include <complex>
#include <cstdint>
#include <utility>

namespace qmeasure {

/// Splittable 64-bit generator: SplitMix64 with a per-stream gamma
/// (SplittableRandom construction). Identical (seed, stream_id) reproduce
/// the identical sequence; distinct stream_ids give statistically
/// independent streams. Gaussians via Box-Muller so sequences do not
/// depend on the standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1), 53-bit resolution.
  double next_double();
  /// Uniform on (0, 1]; safe as a log() argument.
  double next_open01();
  /// Standard normal deviates (Box-Muller pair).
  std::pair<double, double> next_gaussian_pair();
  double next_gaussian();
  /// Re and Im independent standard normals.
  std::complex<double> next_complex_gaussian();
  /// Uniform integer in [0, bound) by rejection; bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  static constexpr const char* generator_name() { return "splitmix64"; }

 private:
  std::uint64_t state_;
  std::uint64_t gamma_;
};

}  // namespace qmeasure
