#include "qmeasure/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmeasure {

namespace {

double offdiag_frobenius(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index q = 0; q < a.cols(); ++q) {
      if (p != q) sum += std::norm(a(p, q));
    }
  }
  return std::sqrt(sum);
}

}  // namespace

HermitianEig jacobi_hermitian(Matrix a) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) {
    throw std::invalid_argument("jacobi_hermitian: matrix must be square and non-empty");
  }
  const double herm_err = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tol::hermitian) {
    throw std::invalid_argument("jacobi_hermitian: input not Hermitian (max asym " +
                                std::to_string(herm_err) + ")");
  }
  // Work on the exactly-Hermitian average so rounding in the caller cannot
  // leak into the rotations.
  a = ((a + a.adjoint()) / 2.0).eval();

  Matrix u = Matrix::Identity(n, n);
  constexpr double convergence = 1e-14;
  constexpr int max_sweeps = 100;

  for (int sweep = 0; sweep < max_sweeps && offdiag_frobenius(a) > convergence; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex beta = a(p, q);
        const double abs_beta = std::abs(beta);
        if (abs_beta == 0.0) continue;

        // Phase that turns the 2x2 pivot block real-symmetric, then the
        // classical rotation angle with the stable small root.
        const Complex phase = beta / abs_beta;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (app - aqq) / (2.0 * abs_beta);
        const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // V differs from identity only in the (p,q) plane:
        //   V_pp = c, V_pq = s*phase, V_qp = -s*conj(phase), V_qq = c.
        const Complex vpq = s * phase;
        const Complex vqp = -s * std::conj(phase);

        // A <- V^H A V, touching rows/cols p and q.
        for (Eigen::Index i = 0; i < n; ++i) {
          const Complex aip = a(i, p);
          const Complex aiq = a(i, q);
          a(i, p) = c * aip + vqp * aiq;
          a(i, q) = vpq * aip + c * aiq;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = c * apj + std::conj(vqp) * aqj;
          a(q, j) = std::conj(vpq) * apj + c * aqj;
        }
        a(p, q) = Complex(0.0, 0.0);
        a(q, p) = Complex(0.0, 0.0);
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);

        for (Eigen::Index i = 0; i < n; ++i) {
          const Complex uip = u(i, p);
          const Complex uiq = u(i, q);
          u(i, p) = c * uip + vqp * uiq;
          u(i, q) = vpq * uip + c * uiq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&a](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() > a(j, j).real();
  });

  HermitianEig result;
  result.values.resize(n);
  result.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    result.values(k) = a(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
    result.vectors.col(k) = u.col(order[static_cast<size_t>(k)]);
  }
  return result;
}

SpectralDecomposition eig_hermitian(const DensityMatrix& rho) {
  HermitianEig eig = jacobi_hermitian(rho.entries());
  std::vector<double> values(eig.values.data(), eig.values.data() + eig.values.size());
  for (double& v : values) {
    if (v < tol::eigenvalue_floor) {
      throw std::domain_error("eig_hermitian: eigenvalue " + std::to_string(v) +
                              " below the -1e-10 PSD tolerance");
    }
    if (v < 0.0) v = 0.0;
  }
  return {Spectrum(std::move(values)), std::move(eig.vectors)};
}

DensityMatrix partial_trace_ancilla(const PureState& psi, const CompositeShape& shape) {
  if (psi.dim() != shape.total_dim()) {
    throw std::invalid_argument("partial_trace_ancilla: state dim " + std::to_string(psi.dim()) +
                                " != M*N = " + std::to_string(shape.total_dim()));
  }
  const int m = shape.system_dim;
  const int n = shape.ancilla_dim;
  const Vector& c = psi.amplitudes();
  Matrix rho = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k <= i; ++k) {
      Complex acc(0.0, 0.0);
      for (int j = 0; j < n; ++j) {
        acc += c(static_cast<Eigen::Index>(i) * n + j) *
               std::conj(c(static_cast<Eigen::Index>(k) * n + j));
      }
      rho(i, k) = acc;
      rho(k, i) = std::conj(acc);
    }
  }
  // Exact-real diagonal and unit trace up to rounding.
  for (int i = 0; i < m; ++i) rho(i, i) = Complex(rho(i, i).real(), 0.0);
  return DensityMatrix(std::move(rho));
}

DensityMatrix partial_trace_system(const PureState& psi, const CompositeShape& shape) {
  if (psi.dim() != shape.total_dim()) {
    throw std::invalid_argument("partial_trace_system: state dim " + std::to_string(psi.dim()) +
                                " != M*N = " + std::to_string(shape.total_dim()));
  }
  const int m = shape.system_dim;
  const int n = shape.ancilla_dim;
  const Vector& c = psi.amplitudes();
  Matrix rho = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l <= j; ++l) {
      Complex acc(0.0, 0.0);
      for (int i = 0; i < m; ++i) {
        acc += c(static_cast<Eigen::Index>(i) * n + j) *
               std::conj(c(static_cast<Eigen::Index>(i) * n + l));
      }
      rho(j, l) = acc;
      rho(l, j) = std::conj(acc);
    }
  }
  for (int j = 0; j < n; ++j) rho(j, j) = Complex(rho(j, j).real(), 0.0);
  return DensityMatrix(std::move(rho));
}

Spectrum schmidt_spectrum(const PureState& psi, const CompositeShape& shape) {
  return eig_hermitian(partial_trace_ancilla(psi, shape)).spectrum;
}

double entanglement_entropy_bits(const Spectrum& spectrum) {
  double bits = 0.0;
  for (int k = 0; k < spectrum.size(); ++k) {
    const double lambda = spectrum[k];
    if (lambda > 0.0) bits -= lambda * std::log2(lambda);
  }
  return bits;
}

BlochVector bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("bloch_from_density: requires a 2x2 density matrix");
  }
  const Matrix& e = rho.entries();
  // r_k = tr(rho sigma_k)
  const double x = 2.0 * e(0, 1).real();
  const double y = -2.0 * e(0, 1).imag();
  const double z = (e(0, 0) - e(1, 1)).real();
  return BlochVector(x, y, z);
}

DensityMatrix density_from_bloch(const BlochVector& r) {
  Matrix e(2, 2);
  e(0, 0) = Complex(0.5 * (1.0 + r.z), 0.0);
  e(1, 1) = Complex(0.5 * (1.0 - r.z), 0.0);
  e(0, 1) = Complex(0.5 * r.x, -0.5 * r.y);
  e(1, 0) = Complex(0.5 * r.x, 0.5 * r.y);
  return DensityMatrix(std::move(e));
}

}  // namespace qmeasure
