#pragma once

#include <Eigen/Dense>

#include "qmeasure/types.hpp"

namespace qmeasure {

/// rho = unitary * diag(values) * unitary^H, values sorted descending.
struct HermitianEig {
  Eigen::VectorXd values;
  Matrix vectors;
};

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
/// Converges when the off-diagonal Frobenius norm drops below 1e-14
/// (at most 100 sweeps). Throws std::invalid_argument if the input is
/// not Hermitian within 1e-12.
HermitianEig jacobi_hermitian(Matrix a);

struct SpectralDecomposition {
  Spectrum spectrum;
  Matrix unitary;
};

/// Eigendecomposition of a density matrix; eigenvalues in [-1e-10, 0)
/// are clamped to 0, anything more negative raises std::domain_error.
SpectralDecomposition eig_hermitian(const DensityMatrix& rho);

/// (rho_S)_{ii'} = sum_j c_{ij} conj(c_{i'j}); traces out H_A.
DensityMatrix partial_trace_ancilla(const PureState& psi, const CompositeShape& shape);
/// (rho_A)_{jj'} = sum_i c_{ij} conj(c_{ij'}); traces out H_S.
DensityMatrix partial_trace_system(const PureState& psi, const CompositeShape& shape);

/// Schmidt coefficients of psi: spectrum of the reduced state of H_S.
Spectrum schmidt_spectrum(const PureState& psi, const CompositeShape& shape);

/// -sum_k lambda_k log2 lambda_k with 0 log 0 := 0. Result in bits.
double entanglement_entropy_bits(const Spectrum& spectrum);

BlochVector bloch_from_density(const DensityMatrix& rho);
DensityMatrix density_from_bloch(const BlochVector& r);

}  // namespace qmeasure
