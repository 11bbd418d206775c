#pragma once

#include <optional>
#include <span>
#include <string>

#include "qmeasure/types.hpp"

namespace qmeasure {

enum class EnsembleKind { Induced, Bures, HilbertSchmidt };

/// Eigenvalue density on the probability simplex, reported with respect to
/// the flat measure dl1..dl_{m-1} (l_m = 1 - sum), on *unordered* tuples.
/// Comparison against descending-sorted spectra multiplies by m! on the
/// ordered region.
///
/// Normalization: m = 2 in closed form, m = 3 by cached quadrature
/// (1e-4 relative), m > 3 evaluates the bare weight with normalized() false.
class EigenDensity {
 public:
  static EigenDensity induced(int m, int n);  // requires 2 <= m <= n
  static EigenDensity bures(int m);
  static EigenDensity hilbert_schmidt(int m);

  int dim() const { return m_; }
  EnsembleKind kind() const { return kind_; }
  int ancilla_dim() const { return n_; }  // meaningful for Induced only
  bool normalized() const { return log_norm_.has_value(); }
  /// Natural log of the normalization constant, when known.
  double log_norm() const;
  std::string id() const;

  /// Density at an unordered simplex point (length m, entries summing to 1
  /// within 1e-10). Bures diverges on the boundary: returns +infinity.
  double operator()(std::span<const double> lambda) const;
  /// The unnormalized weight (same boundary behaviour).
  double weight(std::span<const double> lambda) const;

 private:
  EigenDensity(EnsembleKind kind, int m, int n);

  EnsembleKind kind_;
  int m_;
  int n_;
  std::optional<double> log_norm_;
};

/// Eq.-style per-point density evaluators (normalized where m <= 3).
double density_induced(const Spectrum& spec, int m, int n);
double density_bures(const Spectrum& spec, int m);
double density_hs(const Spectrum& spec, int m);

/// Bloch-ball densities, normalized so that ∫ density * 4 pi r^2 dr = 1
/// over [0, 1]. The first two are constant 3/(4 pi); the Bures one is
/// c / sqrt(1 - r^2) with c fixed by quadrature (numerically 1/pi^2).
double bloch_density_induced22();
double bloch_density_hs();
double bloch_density_bures(double r);  // +infinity for r >= 1
double bloch_bures_constant();

/// Average entanglement entropy in bits for M = 2 against an n-dimensional
/// partner, by the exact double-sum formula (rational arithmetic inside;
/// valid for 2 <= n <= 60, throws std::domain_error outside).
double avg_entropy_induced_2n(int n);
/// Average entanglement entropy in bits, (sum_{k=N+1}^{MN} 1/k - (M-1)/(2N))
/// * log2(e); requires 1 <= m <= n.
double avg_entropy_page(int m, int n);
/// Evaluation path used by the CLI: exact double sum for m = 2, n <= 60,
/// otherwise the closed-form average.
double avg_entropy_bits(int m, int n);

/// Appendix marginals for the induced ensemble at M = 2 (n >= 2):
/// p(X) = Beta(n, n); q(Y) = (n-1)(1-Y)^{n-2};
/// p(r) = (1/2) (2n-1)!/((n-1)!(n-2)!) r^2 ((1-r^2)/4)^{n-2}.
double marginal_x_density(double x, int n);
double overlap_density(double y, int n);
double radial_density_induced(double r, int n);

/// Closed-form CDFs used as goodness-of-fit references.
double marginal_x_cdf(double x, int n);
double overlap_cdf(double y, int n);
double radial_cdf_induced(double r, int n);
double radial_cdf_bures(double r);  // (2/pi)(asin r - r sqrt(1-r^2))
double radial_cdf_hs(double r);     // r^3
double radial_density_bures(double r);
double radial_density_hs(double r);
/// CDF of a diagonal element of rho_S under induced(m, n): Beta(n, (m-1)n).
double diag_element_cdf(double x, int m, int n);
/// Variance of a Beta(n, n) diagonal element: 1/(4(2n+1)).
double beta_nn_variance(int n);

/// Bures line element 2 sum_{jk} |<j|drho|k>|^2 / (lambda_j + lambda_k) in
/// rho's eigenbasis. drho must be Hermitian and traceless within 1e-12.
/// Returns +infinity when some eigenvalue-pair sum is <= 1e-12.
double bures_line_element(const DensityMatrix& rho, const Matrix& drho);
/// Hilbert-Schmidt line element tr(drho^2); drho Hermitian within 1e-12.
double hs_line_element(const Matrix& drho);

/// Coordinates (dlambda, dx, dy) of an infinitesimal perturbation in a
/// fixed eigenbasis; dlambda sums to 0, dx/dy are strictly upper-triangle
/// coefficients of the anti-Hermitian generator.
struct MetricPerturbation {
  Eigen::VectorXd dlambda;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

/// delta rho = U (diag(dlambda) + [dU, diag(lambda)]) U^H for the generator
/// dU = sum_{j<k} (dx_jk + i dy_jk) |j><k| - h.c.
Matrix perturbation_matrix(const Matrix& eigenbasis, std::span<const double> lambda,
                           const MetricPerturbation& pert);
/// The decomposed quadratic form sum_j dlambda_j^2/lambda_j
///   + 4 sum_{j<k} (lambda_j-lambda_k)^2/(lambda_j+lambda_k) (dx^2 + dy^2).
double bures_quadratic_form(std::span<const double> lambda, const MetricPerturbation& pert);

}  // namespace qmeasure
