#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmeasure/analytic.hpp"
#include "qmeasure/types.hpp"

namespace qmeasure {

/// Fixed-edge histogram; merge is associative and exact, so parallel
/// accumulation with a fixed partition reproduces the single-pass result.
struct Histogram {
  std::vector<double> edges;          // strictly increasing, size = bins + 1
  std::vector<std::uint64_t> counts;  // size = bins
  std::uint64_t total = 0;            // == sum(counts); out-of-range values are not added

  static Histogram with_edges(std::vector<double> edges);
  void add(double x);
  void merge(const Histogram& other);
  int bins() const { return static_cast<int>(counts.size()); }
};

enum class GofTest { KolmogorovSmirnov, ChiSquare };

/// pass is statistic <= threshold for KS, p_value >= threshold for
/// chi-square (threshold then holds the significance level).
struct GofReport {
  GofTest test = GofTest::KolmogorovSmirnov;
  double statistic = 0.0;
  std::int64_t n_samples = 0;
  double threshold = 0.0;
  bool pass = false;
  std::optional<double> p_value;
  std::optional<int> dof;

  std::string to_json() const;
  static GofReport from_json(const std::string& text);
};

/// One-sample Kolmogorov-Smirnov against a callable CDF. threshold = 0
/// selects the asymptotic default 1.63/sqrt(n) (alpha ~ 0.01), which
/// requires n >= 1000; an explicit threshold lifts that restriction.
GofReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                  double threshold = 0.0);

/// Two-sample KS statistic sup |F_a - F_b|.
double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square of descending-sorted spectra against an eigenvalue
/// density. m = 2 uses equal-probability bins under the density; m = 3 bins
/// the full simplex on a grid (samples de-sorted by a deterministic
/// per-sample permutation) with quadrature cell probabilities. Bins with
/// expected count < 5 are pooled. alpha is the significance level.
GofReport chi_square_simplex(const std::vector<Spectrum>& spectra, const EigenDensity& density,
                             int bins, double alpha = 0.01);

/// Sample mean and sqrt(variance/n), compensated summation; n >= 2.
std::pair<double, double> mean_with_stderr(std::span<const double> values);

}  // namespace qmeasure
