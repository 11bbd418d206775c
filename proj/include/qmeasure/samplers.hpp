#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "qmeasure/rng.hpp"
#include "qmeasure/types.hpp"

namespace qmeasure {

/// Haar-uniform unit vector: i.i.d. standard complex Gaussian amplitudes,
/// normalized.
PureState haar_pure_state(int dim, RngStream& rng);

/// Haar-uniform unitary: QR of a complex Gaussian matrix with the phase
/// correction (each Q column multiplied by R_jj/|R_jj|).
Matrix haar_unitary(int dim, RngStream& rng);

/// Reduced state of a Haar-random pure state on H_S (x) H_A.
DensityMatrix sample_induced(const CompositeShape& shape, RngStream& rng);

/// Bures-measure qubit: isotropic direction, radial CDF
/// F(r) = (2/pi)(asin r - r sqrt(1-r^2)) inverted to 1e-12.
BlochVector sample_bures_qubit(RngStream& rng);

/// Uniform on the unit 3-ball: isotropic direction, r = u^(1/3).
BlochVector sample_hs_qubit(RngStream& rng);

/// U diag(spec) U^H with U Haar-uniform.
DensityMatrix lift_to_density(const Spectrum& spec, RngStream& rng);

/// A rejection target on the (m-1)-simplex. `weight` is the unnormalized
/// density when `sphere_proposal` is false (uniform Dirichlet(1) proposals);
/// with `sphere_proposal` set, proposals are Dirichlet(1/2) (squared
/// coordinates of a uniform sphere point) and `weight` must exclude the
/// prod lambda^(-1/2) boundary factor they absorb.
struct SimplexTarget {
  std::string id;
  int dim = 0;
  std::function<double(std::span<const double>)> weight;
  double envelope = 0.0;  // finite upper bound of `weight` on the simplex
  bool sphere_proposal = false;
};

/// Standard targets: "hs", "bures", "induced:<n>" (n >= m). m <= 6.
SimplexTarget make_simplex_target(const std::string& density_id, int m);

/// Rejection sampling against `target`; throws EfficiencyError if the
/// measured acceptance rate falls below 1e-6, std::invalid_argument if the
/// envelope is not finite or is observed to be violated.
Spectrum sample_simplex_density(const SimplexTarget& target, RngStream& rng);
Spectrum sample_simplex_density(int m, const std::string& density_id, RngStream& rng);

/// Tagged description of which measure to sample.
struct EnsembleSpec {
  enum class Kind { Induced, BuresQubit, HilbertSchmidtQubit, SimplexDensity };

  Kind kind = Kind::Induced;
  int system_dim = 0;       // M (Induced, SimplexDensity)
  int ancilla_dim = 0;      // N (Induced)
  std::string density_id;   // SimplexDensity target id

  /// Grammar: "induced:M,N" | "bures-qubit" | "hs-qubit" | "simplex:M,ID".
  static EnsembleSpec parse(const std::string& text);
  std::string str() const;
  /// Number of spectrum entries a sample carries.
  int spectrum_size() const;
  /// True when samples carry a full qubit state (Bloch vector available).
  bool has_bloch() const;
};

struct EnsembleSample {
  Spectrum spectrum;
  std::optional<BlochVector> bloch;
};

EnsembleSample draw_sample(const EnsembleSpec& spec, RngStream& rng);

}  // namespace qmeasure
