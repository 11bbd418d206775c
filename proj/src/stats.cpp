#include "qmeasure/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmeasure/quadrature.hpp"
#include "qmeasure/rng.hpp"

namespace qmeasure {

Histogram Histogram::with_edges(std::vector<double> edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("Histogram: edges must be strictly increasing, >= 2 of them");
  }
  Histogram h;
  h.counts.assign(edges.size() - 1, 0);
  h.edges = std::move(edges);
  return h;
}

void Histogram::add(double x) {
  if (x < edges.front() || x >= edges.back()) {
    if (x == edges.back()) {
      // Right-closed final bin.
      ++counts.back();
      ++total;
    }
    return;
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const size_t bin = static_cast<size_t>(std::distance(edges.begin(), it)) - 1;
  ++counts[bin];
  ++total;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges != edges) {
    throw std::invalid_argument("Histogram::merge: edge vectors differ");
  }
  for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  total += other.total;
}

namespace {

const char* test_name(GofTest t) {
  return t == GofTest::KolmogorovSmirnov ? "ks" : "chi-square";
}

GofTest test_from_name(const std::string& s) {
  if (s == "ks") return GofTest::KolmogorovSmirnov;
  if (s == "chi-square") return GofTest::ChiSquare;
  throw std::invalid_argument("unknown test name '" + s + "'");
}

}  // namespace

std::string GofReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "gof-report";
  j["test"] = test_name(test);
  j["statistic"] = statistic;
  j["n_samples"] = n_samples;
  j["threshold"] = threshold;
  j["pass"] = pass;
  if (p_value) j["p_value"] = *p_value;
  if (dof) j["dof"] = *dof;
  return j.dump(2);
}

GofReport GofReport::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GofReport r;
  r.test = test_from_name(j.at("test").get<std::string>());
  r.statistic = j.at("statistic").get<double>();
  r.n_samples = j.at("n_samples").get<std::int64_t>();
  r.threshold = j.at("threshold").get<double>();
  r.pass = j.at("pass").get<bool>();
  if (j.contains("p_value")) r.p_value = j["p_value"].get<double>();
  if (j.contains("dof")) r.dof = j["dof"].get<int>();
  return r;
}

GofReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                  double threshold) {
  if (samples.empty()) {
    throw std::domain_error("ks_test: samples must be non-empty");
  }
  const auto n = samples.size();
  if (threshold == 0.0) {
    if (n < 1000) {
      throw std::domain_error(
          "ks_test: the asymptotic default threshold requires n >= 1000; pass an explicit "
          "threshold for smaller samples");
    }
    threshold = 1.63 / std::sqrt(static_cast<double>(n));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  double statistic = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    if (!(f >= 0.0 && f <= 1.0 + 1e-12)) {
      throw std::invalid_argument("ks_test: CDF returned " + std::to_string(f) +
                                  " outside [0, 1]");
    }
    const double below = f - static_cast<double>(i) * inv_n;
    const double above = static_cast<double>(i + 1) * inv_n - f;
    statistic = std::max({statistic, below, above});
  }

  GofReport report;
  report.test = GofTest::KolmogorovSmirnov;
  report.statistic = statistic;
  report.n_samples = static_cast<std::int64_t>(n);
  report.threshold = threshold;
  report.pass = statistic <= threshold;
  return report;
}

double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::domain_error("ks_statistic_two_sample: both samples must be non-empty");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  double statistic = 0.0;
  size_t ia = 0;
  size_t ib = 0;
  while (ia < sa.size() && ib < sb.size()) {
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    const double fa = static_cast<double>(ia) / static_cast<double>(sa.size());
    const double fb = static_cast<double>(ib) / static_cast<double>(sb.size());
    statistic = std::max(statistic, std::abs(fa - fb));
  }
  return statistic;
}

namespace {

struct BinnedCounts {
  std::vector<double> expected;       // probabilities
  std::vector<std::uint64_t> counts;  // same length
};

// m = 2: equal-probability bins over lambda_1 in [1/2, 1] under the ordered
// density 2 * f(lambda_1, 1 - lambda_1).
BinnedCounts bin_m2(const std::vector<Spectrum>& spectra, const EigenDensity& density,
                    int bins) {
  auto ordered_density = [&density](double l1) {
    const double point[2] = {l1, 1.0 - l1};
    const double v = 2.0 * density(point);
    return std::isfinite(v) ? v : 0.0;  // boundary singularities carry no mass
  };
  EndpointFlags flags;
  if (density.kind() == EnsembleKind::Bures) flags.right_sqrt_singular = true;
  const TabulatedCdf cdf(ordered_density, 0.5, 1.0, flags, 512);

  std::vector<double> edges(static_cast<size_t>(bins) + 1);
  edges.front() = 0.5;
  edges.back() = 1.0;
  for (int i = 1; i < bins; ++i) {
    edges[static_cast<size_t>(i)] = cdf.quantile(static_cast<double>(i) / bins);
  }

  Histogram hist = Histogram::with_edges(edges);
  for (const Spectrum& s : spectra) {
    if (s.size() != 2) {
      throw std::invalid_argument("chi_square_simplex: spectra must have length 2");
    }
    hist.add(s[0]);
  }
  BinnedCounts out;
  out.counts = hist.counts;
  out.expected.resize(static_cast<size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    out.expected[static_cast<size_t>(i)] = cdf(edges[static_cast<size_t>(i) + 1]) -
                                           cdf(edges[static_cast<size_t>(i)]);
  }
  return out;
}

// Probability of the density over cell [a,b] x [c,d] intersected with the
// simplex. Iterated Gauss-Legendre, with the outer integral split at the
// abscissae where the hypotenuse crosses the cell's lambda_2 range, so each
// piece is smooth (exact for polynomial densities).
double cell_probability(const EigenDensity& density, double a, double b, double c, double d) {
  auto inner = [&](double l1) {
    const double hi = std::min(d, 1.0 - l1);
    if (hi <= c) return 0.0;
    return gauss_legendre(
        [&density, l1](double l2) {
          const double point[3] = {l1, l2, 1.0 - l1 - l2};
          const double v = density(point);
          return std::isfinite(v) ? v : 0.0;
        },
        c, hi);
  };
  std::vector<double> breaks = {a, b};
  for (double crossing : {1.0 - d, 1.0 - c}) {
    if (crossing > a && crossing < b) breaks.push_back(crossing);
  }
  std::sort(breaks.begin(), breaks.end());
  double p = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    p += gauss_legendre(inner, breaks[i], breaks[i + 1]);
  }
  return p;
}

// m = 3: de-sort each spectrum with a deterministic per-sample permutation
// (the density is symmetric, so sorted spectra pushed through a uniform
// permutation are distributed exactly by it), then grid the full simplex.
BinnedCounts bin_m3(const std::vector<Spectrum>& spectra, const EigenDensity& density,
                    int grid) {
  const double h = 1.0 / grid;
  std::vector<double> expected(static_cast<size_t>(grid) * static_cast<size_t>(grid), 0.0);
  std::vector<std::uint64_t> counts(expected.size(), 0);

  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = i * h;
      const double b = (i + 1) * h;
      const double c = j * h;
      const double d = (j + 1) * h;
      if (a + c >= 1.0) continue;  // cell outside the simplex
      expected[static_cast<size_t>(i) * grid + static_cast<size_t>(j)] =
          cell_probability(density, a, b, c, d);
    }
  }

  constexpr std::uint64_t permutation_seed = 0x9d2c5680u;
  for (size_t s = 0; s < spectra.size(); ++s) {
    const Spectrum& spec = spectra[s];
    if (spec.size() != 3) {
      throw std::invalid_argument("chi_square_simplex: spectra must have length 3");
    }
    double v[3] = {spec[0], spec[1], spec[2]};
    RngStream perm_rng(permutation_seed, static_cast<std::uint64_t>(s));
    for (int k = 2; k >= 1; --k) {
      const auto swap_with = static_cast<int>(perm_rng.next_below(static_cast<std::uint64_t>(k) + 1));
      std::swap(v[k], v[swap_with]);
    }
    const int i = std::min(static_cast<int>(v[0] / h), grid - 1);
    const int j = std::min(static_cast<int>(v[1] / h), grid - 1);
    ++counts[static_cast<size_t>(i) * grid + static_cast<size_t>(j)];
  }
  return {std::move(expected), std::move(counts)};
}

}  // namespace

GofReport chi_square_simplex(const std::vector<Spectrum>& spectra, const EigenDensity& density,
                             int bins, double alpha) {
  if (spectra.empty()) {
    throw std::domain_error("chi_square_simplex: need at least one spectrum");
  }
  if (bins < 2) {
    throw std::invalid_argument("chi_square_simplex: need at least 2 bins");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("chi_square_simplex: alpha must lie in (0, 1)");
  }
  if (density.dim() != 2 && density.dim() != 3) {
    throw std::invalid_argument("chi_square_simplex: implemented for m = 2 and m = 3");
  }

  const auto n = static_cast<double>(spectra.size());
  BinnedCounts binned = (density.dim() == 2) ? bin_m2(spectra, density, bins)
                                             : bin_m3(spectra, density, bins);

  // Normalize expected probabilities (the m = 3 grid covers the simplex
  // exactly, but quadrature can leave ~1e-12 slack).
  double total_p = 0.0;
  for (double p : binned.expected) total_p += p;
  if (!(total_p > 0.0)) {
    throw std::invalid_argument("chi_square_simplex: density has no mass on the binning");
  }
  for (double& p : binned.expected) p /= total_p;

  // Pool every bin whose expected count is < 5.
  double pooled_expected = 0.0;
  std::uint64_t pooled_count = 0;
  std::vector<std::pair<double, std::uint64_t>> effective;
  for (size_t i = 0; i < binned.expected.size(); ++i) {
    const double e = binned.expected[i] * n;
    if (e < 5.0) {
      pooled_expected += e;
      pooled_count += binned.counts[i];
    } else {
      effective.emplace_back(e, binned.counts[i]);
    }
  }
  if (pooled_expected > 0.0 || pooled_count > 0) {
    effective.emplace_back(pooled_expected, pooled_count);
  }
  if (effective.size() < 2) {
    throw std::invalid_argument("chi_square_simplex: fewer than 2 effective bins");
  }

  double statistic = 0.0;
  for (const auto& [e, o] : effective) {
    if (e <= 0.0) {
      if (o > 0) statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double diff = static_cast<double>(o) - e;
    statistic += diff * diff / e;
  }

  const int dof = static_cast<int>(effective.size()) - 1;
  const boost::math::chi_squared dist(dof);
  const double p_value =
      std::isinf(statistic) ? 0.0 : boost::math::cdf(boost::math::complement(dist, statistic));

  GofReport report;
  report.test = GofTest::ChiSquare;
  report.statistic = statistic;
  report.n_samples = static_cast<std::int64_t>(spectra.size());
  report.threshold = alpha;
  report.pass = p_value >= alpha;
  report.p_value = p_value;
  report.dof = dof;
  return report;
}

std::pair<double, double> mean_with_stderr(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::domain_error("mean_with_stderr: need at least 2 values");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double x = v - carry;
    const double t = sum + x;
    carry = (t - sum) - x;
    sum = t;
  }
  const double mean = sum / n;

  double sq = 0.0;
  carry = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double x = d * d - carry;
    const double t = sq + x;
    carry = (t - sq) - x;
    sq = t;
  }
  const double variance = sq / (n - 1.0);
  return {mean, std::sqrt(variance / n)};
}

}  // namespace qmeasure
