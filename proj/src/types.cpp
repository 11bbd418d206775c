#include "qmeasure/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace qmeasure {

CompositeShape::CompositeShape(int system, int ancilla)
    : system_dim(system), ancilla_dim(ancilla) {
  if (system < 1 || ancilla < 1) {
    throw std::domain_error("CompositeShape: dimensions must be >= 1, got (" +
                            std::to_string(system) + ", " + std::to_string(ancilla) + ")");
  }
}

PureState::PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw std::domain_error("PureState: dimension must be >= 1");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol::unit_norm) {
    throw std::invalid_argument("PureState: amplitudes not unit-norm (|norm-1| = " +
                                std::to_string(std::abs(norm - 1.0)) + ")");
  }
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("DensityMatrix: entries must be square and non-empty");
  }
  const double herm_err = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tol::hermitian) {
    throw std::invalid_argument("DensityMatrix: not Hermitian (max |A - A^H| = " +
                                std::to_string(herm_err) + ")");
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol::trace) {
    throw std::invalid_argument("DensityMatrix: trace != 1 (|tr - 1| = " +
                                std::to_string(std::abs(tr - Complex(1.0, 0.0))) + ")");
  }
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::domain_error("Spectrum: must be non-empty");
  }
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= tol::eigenvalue_floor && v <= 1.0 - tol::eigenvalue_floor)) {
      throw std::invalid_argument("Spectrum: value " + std::to_string(v) +
                                  " outside [-1e-10, 1+1e-10]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol::spectrum_sum) {
    throw std::invalid_argument("Spectrum: sum != 1 (|sum - 1| = " +
                                std::to_string(std::abs(sum - 1.0)) + ")");
  }
  std::sort(values_.begin(), values_.end(), std::greater<double>());
}

BlochVector::BlochVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
  const double r = radius();
  if (r > 1.0 + tol::bloch_radius) {
    throw std::domain_error("BlochVector: modulus " + std::to_string(r) + " exceeds 1");
  }
}

double BlochVector::radius() const { return std::sqrt(x * x + y * y + z * z); }

}  // namespace qmeasure
