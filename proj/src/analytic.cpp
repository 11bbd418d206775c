#include "qmeasure/analytic.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmeasure/linalg.hpp"
#include "qmeasure/quadrature.hpp"

namespace qmeasure {

namespace {

constexpr double pi = std::numbers::pi;
const double log2_e = std::log2(std::numbers::e);
constexpr double inf = std::numeric_limits<double>::infinity();

void check_simplex_point(std::span<const double> lambda, int m) {
  if (static_cast<int>(lambda.size()) != m) {
    throw std::invalid_argument("EigenDensity: point has length " +
                                std::to_string(lambda.size()) + ", expected " +
                                std::to_string(m));
  }
  double sum = 0.0;
  for (double v : lambda) {
    if (v < tol::eigenvalue_floor) {
      throw std::domain_error("EigenDensity: negative coordinate " + std::to_string(v));
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol::spectrum_sum) {
    throw std::domain_error("EigenDensity: coordinates sum to " + std::to_string(sum));
  }
}

// log (2n-1)! / (2 (n-2)! (n-1)!), the explicit constant of the m = 2
// induced eigenvalue density.
double log_const_induced_m2(int n) {
  return std::lgamma(2.0 * n) - std::lgamma(n - 1.0) - std::lgamma(static_cast<double>(n)) -
         std::log(2.0);
}

double unnormalized_weight(EnsembleKind kind, int m, int n,
                           std::span<const double> lambda) {
  switch (kind) {
    case EnsembleKind::Induced: {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          const double d = lambda[static_cast<size_t>(j)] - lambda[static_cast<size_t>(k)];
          w *= d * d;
        }
      }
      if (n > m) {
        for (int k = 0; k < m; ++k) {
          w *= std::pow(std::max(lambda[static_cast<size_t>(k)], 0.0),
                        static_cast<double>(n - m));
        }
      }
      return w;
    }
    case EnsembleKind::HilbertSchmidt: {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          const double d = lambda[static_cast<size_t>(j)] - lambda[static_cast<size_t>(k)];
          w *= d * d;
        }
      }
      return w;
    }
    case EnsembleKind::Bures: {
      double w = 1.0;
      for (int k = 0; k < m; ++k) {
        const double l = lambda[static_cast<size_t>(k)];
        if (l <= 0.0) return inf;  // boundary singularity
        w /= std::sqrt(l);
      }
      for (int j = 0; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          const double lj = lambda[static_cast<size_t>(j)];
          const double lk = lambda[static_cast<size_t>(k)];
          w *= (lj - lk) * (lj - lk) / (lj + lk);
        }
      }
      return w;
    }
  }
  throw std::logic_error("unreachable ensemble kind");
}

// Simplex integral of the bare weight for m = 3, cached once per ensemble.
double simplex3_weight_integral(EnsembleKind kind, int n) {
  static std::map<std::pair<int, int>, double> cache;
  static std::mutex mutex;
  const auto key = std::make_pair(static_cast<int>(kind), n);
  std::lock_guard<std::mutex> lock(mutex);
  if (const auto it = cache.find(key); it != cache.end()) return it->second;

  const bool singular = (kind == EnsembleKind::Bures);
  const double value = integrate_simplex2(
      [kind, n](double l1, double l2) {
        const double l3 = 1.0 - l1 - l2;
        const double point[3] = {l1, l2, l3};
        return unnormalized_weight(kind, 3, n, point);
      },
      1e-6, singular);
  cache.emplace(key, value);
  return value;
}

}  // namespace

EigenDensity::EigenDensity(EnsembleKind kind, int m, int n) : kind_(kind), m_(m), n_(n) {
  if (m < 2) {
    throw std::domain_error("EigenDensity: m must be >= 2");
  }
  if (kind == EnsembleKind::Induced && m > n) {
    throw std::domain_error(
        "EigenDensity::induced: requires m <= n; swap the dimensions (the eigenvalue "
        "distribution is symmetric in (m, n))");
  }
  if (m == 2) {
    switch (kind_) {
      case EnsembleKind::Induced:
        log_norm_ = log_const_induced_m2(n);
        break;
      case EnsembleKind::Bures:
        log_norm_ = std::log(2.0 / pi);
        break;
      case EnsembleKind::HilbertSchmidt:
        log_norm_ = std::log(3.0);
        break;
    }
  } else if (m == 3) {
    log_norm_ = -std::log(simplex3_weight_integral(kind_, n_));
  }
}

EigenDensity EigenDensity::induced(int m, int n) {
  return EigenDensity(EnsembleKind::Induced, m, n);
}
EigenDensity EigenDensity::bures(int m) { return EigenDensity(EnsembleKind::Bures, m, 0); }
EigenDensity EigenDensity::hilbert_schmidt(int m) {
  return EigenDensity(EnsembleKind::HilbertSchmidt, m, 0);
}

double EigenDensity::log_norm() const {
  if (!log_norm_) {
    throw std::logic_error("EigenDensity: normalization not available for m > 3");
  }
  return *log_norm_;
}

std::string EigenDensity::id() const {
  switch (kind_) {
    case EnsembleKind::Induced:
      return "induced:" + std::to_string(n_);
    case EnsembleKind::Bures:
      return "bures";
    case EnsembleKind::HilbertSchmidt:
      return "hs";
  }
  return {};
}

double EigenDensity::weight(std::span<const double> lambda) const {
  check_simplex_point(lambda, m_);
  return unnormalized_weight(kind_, m_, n_, lambda);
}

double EigenDensity::operator()(std::span<const double> lambda) const {
  const double w = weight(lambda);
  if (!normalized()) return w;
  if (std::isinf(w)) return w;
  return w * std::exp(*log_norm_);
}

double density_induced(const Spectrum& spec, int m, int n) {
  return EigenDensity::induced(m, n)(spec.span());
}

double density_bures(const Spectrum& spec, int m) { return EigenDensity::bures(m)(spec.span()); }

double density_hs(const Spectrum& spec, int m) {
  return EigenDensity::hilbert_schmidt(m)(spec.span());
}

double bloch_density_induced22() { return 3.0 / (4.0 * pi); }

double bloch_density_hs() { return 3.0 / (4.0 * pi); }

double bloch_bures_constant() {
  // Fixed by quadrature of the radial weight, not taken from a closed form.
  static const double c = [] {
    const double mass = integrate(
        [](double r) { return 4.0 * pi * r * r / std::sqrt(1.0 - r * r); }, 0.0, 1.0, 1e-12,
        {false, true});
    return 1.0 / mass;
  }();
  return c;
}

double bloch_density_bures(double r) {
  if (r < 0.0) {
    throw std::domain_error("bloch_density_bures: r must be >= 0");
  }
  if (r >= 1.0) return inf;
  return bloch_bures_constant() / std::sqrt(1.0 - r * r);
}

namespace {

namespace mp = boost::multiprecision;
using BigInt = mp::cpp_int;
using Rational = mp::cpp_rational;

BigInt factorial_big(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

BigInt binomial_big(int n, int k) {
  return factorial_big(n) / (factorial_big(k) * factorial_big(n - k));
}

}  // namespace

double avg_entropy_induced_2n(int n) {
  if (n < 2) {
    throw std::domain_error("avg_entropy_induced_2n: requires n >= 2");
  }
  if (n > 60) {
    throw std::domain_error(
        "avg_entropy_induced_2n: the double-sum path is limited to n <= 60; use "
        "avg_entropy_page");
  }
  // The double sum and its prefactor are exact rationals; the binomial
  // cancellation that destroys a double-precision evaluation is therefore
  // exact here, and log2(e) enters once at the end.
  Rational sum = 0;
  for (int s = 0; s <= n - 2; ++s) {
    Rational inner = 0;
    for (int t = 0; t <= s + 1; ++t) {
      inner += Rational(1, 2 * t + 1);
    }
    Rational term(binomial_big(n - 2, s), BigInt(s + 2) * BigInt(2 * s + 3));
    if (s % 2 == 1) term = -term;
    sum += term * inner;
  }
  const Rational prefactor(factorial_big(2 * n - 1), factorial_big(n - 2) *
                                                         factorial_big(n - 1) *
                                                         mp::pow(BigInt(4), n - 1));
  return (sum * prefactor).convert_to<double>() * log2_e;
}

double avg_entropy_page(int m, int n) {
  if (m < 1 || n < 1 || m > n) {
    throw std::domain_error("avg_entropy_page: requires 1 <= m <= n");
  }
  // Harmonic tail, compensated summation.
  double sum = 0.0;
  double carry = 0.0;
  for (int k = n + 1; k <= m * n; ++k) {
    const double x = 1.0 / k - carry;
    const double t = sum + x;
    carry = (t - sum) - x;
    sum = t;
  }
  sum -= static_cast<double>(m - 1) / (2.0 * n);
  return sum * log2_e;
}

double avg_entropy_bits(int m, int n) {
  if (m == 2 && n >= 2 && n <= 60) return avg_entropy_induced_2n(n);
  return avg_entropy_page(m, n);
}

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1], got " +
                            std::to_string(v));
  }
}

void check_marginal_n(int n) {
  if (n < 2) {
    throw std::domain_error("appendix marginals require n >= 2");
  }
}

}  // namespace

double marginal_x_density(double x, int n) {
  check_unit_interval(x, "x");
  check_marginal_n(n);
  const double log_c = std::lgamma(2.0 * n) - 2.0 * std::lgamma(static_cast<double>(n));
  if ((x == 0.0 || x == 1.0) && n >= 2) return 0.0;
  return std::exp(log_c + (n - 1.0) * (std::log(x) + std::log1p(-x)));
}

double overlap_density(double y, int n) {
  check_unit_interval(y, "y");
  check_marginal_n(n);
  if (n == 2) return 1.0;
  return (n - 1.0) * std::pow(1.0 - y, n - 2.0);
}

double radial_density_induced(double r, int n) {
  check_unit_interval(r, "r");
  check_marginal_n(n);
  const double log_c = std::lgamma(2.0 * n) - std::lgamma(static_cast<double>(n)) -
                       std::lgamma(n - 1.0) - std::log(2.0);
  const double base = (1.0 - r * r) / 4.0;
  if (base == 0.0 && n > 2) return 0.0;
  return std::exp(log_c) * r * r * std::pow(base, n - 2.0);
}

double marginal_x_cdf(double x, int n) {
  check_unit_interval(x, "x");
  check_marginal_n(n);
  return boost::math::ibeta(static_cast<double>(n), static_cast<double>(n), x);
}

double overlap_cdf(double y, int n) {
  check_unit_interval(y, "y");
  check_marginal_n(n);
  return 1.0 - std::pow(1.0 - y, n - 1.0);
}

double radial_cdf_induced(double r, int n) {
  check_unit_interval(r, "r");
  check_marginal_n(n);
  return boost::math::ibeta(1.5, n - 1.0, r * r);
}

double radial_cdf_bures(double r) {
  check_unit_interval(r, "r");
  return (2.0 / pi) * (std::asin(r) - r * std::sqrt(1.0 - r * r));
}

double radial_cdf_hs(double r) {
  check_unit_interval(r, "r");
  return r * r * r;
}

double radial_density_bures(double r) {
  check_unit_interval(r, "r");
  if (r >= 1.0) return inf;
  return (4.0 / pi) * r * r / std::sqrt(1.0 - r * r);
}

double radial_density_hs(double r) {
  check_unit_interval(r, "r");
  return 3.0 * r * r;
}

double diag_element_cdf(double x, int m, int n) {
  check_unit_interval(x, "x");
  if (m < 2 || n < 1) {
    throw std::domain_error("diag_element_cdf: requires m >= 2, n >= 1");
  }
  return boost::math::ibeta(static_cast<double>(n), static_cast<double>((m - 1)) * n, x);
}

double beta_nn_variance(int n) {
  if (n < 1) {
    throw std::domain_error("beta_nn_variance: requires n >= 1");
  }
  return 1.0 / (4.0 * (2.0 * n + 1.0));
}

namespace {

void check_hermitian_perturbation(const Matrix& drho) {
  if (drho.rows() == 0 || drho.rows() != drho.cols()) {
    throw std::invalid_argument("perturbation must be square and non-empty");
  }
  const double herm_err = (drho - drho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tol::hermitian) {
    throw std::invalid_argument("perturbation not Hermitian (max asym " +
                                std::to_string(herm_err) + ")");
  }
}

}  // namespace

double bures_line_element(const DensityMatrix& rho, const Matrix& drho) {
  check_hermitian_perturbation(drho);
  if (drho.rows() != rho.entries().rows()) {
    throw std::invalid_argument("bures_line_element: dimension mismatch");
  }
  const double trace_err = std::abs(drho.trace());
  if (trace_err > tol::trace) {
    throw std::invalid_argument("bures_line_element: perturbation trace " +
                                std::to_string(trace_err) + " != 0");
  }
  const SpectralDecomposition eig = eig_hermitian(rho);
  const Matrix tilde = eig.unitary.adjoint() * drho * eig.unitary;
  const int d = rho.dim();
  double ds2 = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const double pair_sum = eig.spectrum[j] + eig.spectrum[k];
      if (pair_sum <= 1e-12) return inf;  // degenerate zero pair: singular
      ds2 += 2.0 * std::norm(tilde(j, k)) / pair_sum;
    }
  }
  return ds2;
}

double hs_line_element(const Matrix& drho) {
  check_hermitian_perturbation(drho);
  return (drho * drho).trace().real();
}

Matrix perturbation_matrix(const Matrix& eigenbasis, std::span<const double> lambda,
                           const MetricPerturbation& pert) {
  const int d = static_cast<int>(lambda.size());
  if (eigenbasis.rows() != d || pert.dlambda.size() != d || pert.dx.rows() != d ||
      pert.dy.rows() != d) {
    throw std::invalid_argument("perturbation_matrix: dimension mismatch");
  }
  Matrix in_basis = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    in_basis(j, j) = Complex(pert.dlambda(j), 0.0);
  }
  // <j|[dU, diag(lambda)]|k> = (dx + i dy)(lambda_k - lambda_j) for j < k.
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const double gap = lambda[static_cast<size_t>(k)] - lambda[static_cast<size_t>(j)];
      const Complex entry = Complex(pert.dx(j, k), pert.dy(j, k)) * gap;
      in_basis(j, k) = entry;
      in_basis(k, j) = std::conj(entry);
    }
  }
  return eigenbasis * in_basis * eigenbasis.adjoint();
}

double bures_quadratic_form(std::span<const double> lambda, const MetricPerturbation& pert) {
  const int d = static_cast<int>(lambda.size());
  double ds2 = 0.0;
  for (int j = 0; j < d; ++j) {
    const double l = lambda[static_cast<size_t>(j)];
    if (l <= 1e-12 && pert.dlambda(j) != 0.0) return inf;
    if (l > 1e-12) ds2 += pert.dlambda(j) * pert.dlambda(j) / l;
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const double lj = lambda[static_cast<size_t>(j)];
      const double lk = lambda[static_cast<size_t>(k)];
      if (lj + lk <= 1e-12) return inf;
      const double gap2 = (lj - lk) * (lj - lk);
      ds2 += 4.0 * gap2 / (lj + lk) *
             (pert.dx(j, k) * pert.dx(j, k) + pert.dy(j, k) * pert.dy(j, k));
    }
  }
  return ds2;
}

}  // namespace qmeasure
