#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmeasure {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double unit_norm = 1e-12;
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double eigenvalue_floor = -1e-10;
inline constexpr double spectrum_sum = 1e-10;
inline constexpr double bloch_radius = 1e-12;
}  // namespace tol

/// Thrown when a rejection sampler's measured acceptance rate drops below
/// the configured floor (1e-6). Reported, never silent.
struct EfficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dimensions (M, N) of a bipartite system H_S (x) H_A.
struct CompositeShape {
  int system_dim;   // dim of H_S
  int ancilla_dim;  // dim of H_A

  CompositeShape(int system, int ancilla);
  int total_dim() const { return system_dim * ancilla_dim; }
};

/// Unit vector on a D-dimensional complex Hilbert space.
/// Invariant: Euclidean norm 1 within 1e-12 (checked at construction).
class PureState {
 public:
  explicit PureState(Vector amplitudes);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const Vector& amplitudes() const { return amplitudes_; }
  /// Coefficient c_{ij} under the flattening (i, j) -> i*ancilla_dim + j.
  Complex coeff(int i, int j, const CompositeShape& shape) const {
    return amplitudes_(static_cast<Eigen::Index>(i) * shape.ancilla_dim + j);
  }

 private:
  Vector amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
/// Construction checks hermiticity and trace; positive semidefiniteness
/// (all eigenvalues >= -1e-10) is guaranteed by the producing operations
/// and verified explicitly by eigendecomposition where tests require it.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

/// Eigenvalue spectrum on the probability simplex, sorted descending.
/// Values in [-1e-10, 1+1e-10], sum 1 within 1e-10. Construction sorts.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[static_cast<size_t>(k)]; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Real 3-vector of modulus <= 1 representing a qubit state.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  BlochVector() = default;
  BlochVector(double x_, double y_, double z_);
  double radius() const;
};

}  // namespace qmeasure
