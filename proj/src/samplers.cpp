#include "qmeasure/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qmeasure/linalg.hpp"

namespace qmeasure {

namespace {

constexpr double pi = std::numbers::pi;

void check_dim(int dim) {
  if (dim < 1) {
    throw std::domain_error("dimension must be >= 1, got " + std::to_string(dim));
  }
}

/// Isotropic unit direction via normalized Gaussian triple.
void isotropic_direction(RngStream& rng, double& x, double& y, double& z) {
  double norm2 = 0.0;
  do {
    const auto [a, b] = rng.next_gaussian_pair();
    const double c = rng.next_gaussian();
    x = a;
    y = b;
    z = c;
    norm2 = x * x + y * y + z * z;
  } while (norm2 < 1e-300);
  const double inv = 1.0 / std::sqrt(norm2);
  x *= inv;
  y *= inv;
  z *= inv;
}

/// Radius for the Bures qubit measure: invert
/// F(r) = (2/pi)(asin r - r sqrt(1-r^2)) by bracketed bisection + Newton.
double bures_radius(double u) {
  auto cdf = [](double r) {
    return (2.0 / pi) * (std::asin(r) - r * std::sqrt(1.0 - r * r));
  };
  auto pdf = [](double r) { return (4.0 / pi) * r * r / std::sqrt(1.0 - r * r); };

  double lo = 0.0;
  double hi = 1.0;
  double r = std::cbrt(u);  // decent starting point: the 3r^2 quantile
  for (int it = 0; it < 200; ++it) {
    const double f = cdf(r) - u;
    if (std::abs(f) <= 1e-12) break;
    if (f > 0.0) {
      hi = r;
    } else {
      lo = r;
    }
    const double slope = pdf(r);
    double next = (slope > 1e-8) ? r - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
    if (hi - lo < 1e-15) break;
  }
  return r;
}

std::vector<double> dirichlet1_proposal(int m, RngStream& rng) {
  std::vector<double> lambda(static_cast<size_t>(m));
  double sum = 0.0;
  for (double& v : lambda) {
    v = -std::log(rng.next_open01());
    sum += v;
  }
  for (double& v : lambda) v /= sum;
  return lambda;
}

std::vector<double> dirichlet_half_proposal(int m, RngStream& rng) {
  std::vector<double> lambda(static_cast<size_t>(m));
  double sum = 0.0;
  do {
    sum = 0.0;
    for (double& v : lambda) {
      const double g = rng.next_gaussian();
      v = g * g;
      sum += v;
    }
  } while (sum < 1e-300);
  for (double& v : lambda) v /= sum;
  return lambda;
}

}  // namespace

PureState haar_pure_state(int dim, RngStream& rng) {
  check_dim(dim);
  Vector amplitudes(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      const Complex c = rng.next_complex_gaussian();
      amplitudes(i) = c;
      norm2 += std::norm(c);
    }
  } while (norm2 < 1e-300);
  amplitudes /= std::sqrt(norm2);
  // One more normalization pass keeps the invariant tight for large dims.
  amplitudes /= amplitudes.norm();
  return PureState(std::move(amplitudes));
}

Matrix haar_unitary(int dim, RngStream& rng) {
  check_dim(dim);
  Matrix gaussian(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      gaussian(i, j) = rng.next_complex_gaussian();
    }
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ();
  const Matrix& qrmat = qr.matrixQR();
  // Plain QR is not Haar: fix each column's phase by R_jj/|R_jj|.
  for (int j = 0; j < dim; ++j) {
    const Complex rjj = qrmat(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) {
      q.col(j) *= rjj / mag;
    }
  }
  return q;
}

DensityMatrix sample_induced(const CompositeShape& shape, RngStream& rng) {
  return partial_trace_ancilla(haar_pure_state(shape.total_dim(), rng), shape);
}

BlochVector sample_bures_qubit(RngStream& rng) {
  const double r = bures_radius(rng.next_double());
  double x = 0.0, y = 0.0, z = 0.0;
  isotropic_direction(rng, x, y, z);
  return BlochVector(r * x, r * y, r * z);
}

BlochVector sample_hs_qubit(RngStream& rng) {
  const double r = std::cbrt(rng.next_double());
  double x = 0.0, y = 0.0, z = 0.0;
  isotropic_direction(rng, x, y, z);
  return BlochVector(r * x, r * y, r * z);
}

DensityMatrix lift_to_density(const Spectrum& spec, RngStream& rng) {
  const int d = spec.size();
  const Matrix u = haar_unitary(d, rng);
  Matrix rho = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    rho += spec[k] * (u.col(k) * u.col(k).adjoint());
  }
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  // Renormalize the trace drift from the accumulation.
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

SimplexTarget make_simplex_target(const std::string& density_id, int m) {
  if (m < 2 || m > 6) {
    throw std::domain_error("simplex targets support 2 <= m <= 6, got m = " +
                            std::to_string(m));
  }
  SimplexTarget target;
  target.id = density_id;
  target.dim = m;

  auto squared_differences = [m](std::span<const double> lambda) {
    double w = 1.0;
    for (int j = 0; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        const double d = lambda[static_cast<size_t>(j)] - lambda[static_cast<size_t>(k)];
        w *= d * d;
      }
    }
    return w;
  };

  if (density_id == "hs") {
    target.weight = squared_differences;
    target.envelope = 1.0;  // each factor <= 1 on the simplex
    target.sphere_proposal = false;
    return target;
  }
  if (density_id == "bures") {
    // The prod lambda^(-1/2) boundary factor lives in the Dirichlet(1/2)
    // proposal; what remains is bounded by 1.
    target.weight = [m](std::span<const double> lambda) {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          const double lj = lambda[static_cast<size_t>(j)];
          const double lk = lambda[static_cast<size_t>(k)];
          w *= (lj - lk) * (lj - lk) / (lj + lk);
        }
      }
      return w;
    };
    target.envelope = 1.0;
    target.sphere_proposal = true;
    return target;
  }
  if (density_id.rfind("induced:", 0) == 0) {
    const int n = std::stoi(density_id.substr(8));
    if (n < m) {
      throw std::domain_error("induced simplex target requires n >= m");
    }
    target.weight = [m, n, squared_differences](std::span<const double> lambda) {
      double w = squared_differences(lambda);
      for (int k = 0; k < m; ++k) {
        w *= std::pow(std::max(lambda[static_cast<size_t>(k)], 0.0),
                      static_cast<double>(n - m));
      }
      return w;
    };
    target.envelope = 1.0;
    target.sphere_proposal = false;
    return target;
  }
  throw std::invalid_argument("unknown simplex density id '" + density_id +
                              "' (expected hs | bures | induced:<n>)");
}

Spectrum sample_simplex_density(const SimplexTarget& target, RngStream& rng) {
  if (target.dim < 2 || target.dim > 6) {
    throw std::domain_error("simplex rejection supports 2 <= m <= 6");
  }
  if (!std::isfinite(target.envelope) || target.envelope <= 0.0) {
    throw std::invalid_argument("simplex target '" + target.id +
                                "': envelope bound must be finite and positive");
  }
  constexpr std::uint64_t max_attempts = 4'000'000;  // acceptance-rate floor 1e-6
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<double> lambda = target.sphere_proposal
                                     ? dirichlet_half_proposal(target.dim, rng)
                                     : dirichlet1_proposal(target.dim, rng);
    const double w = target.weight(lambda);
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("simplex target '" + target.id +
                                  "': weight not finite and non-negative on the interior");
    }
    if (w > target.envelope * (1.0 + 1e-9)) {
      throw std::invalid_argument("simplex target '" + target.id +
                                  "': envelope bound violated (weight " + std::to_string(w) +
                                  " > " + std::to_string(target.envelope) + ")");
    }
    if (rng.next_double() * target.envelope <= w) {
      return Spectrum(std::move(lambda));
    }
  }
  throw EfficiencyError("simplex target '" + target.id + "' (m = " +
                        std::to_string(target.dim) +
                        "): acceptance rate below 1e-6 over the calibration batch");
}

Spectrum sample_simplex_density(int m, const std::string& density_id, RngStream& rng) {
  return sample_simplex_density(make_simplex_target(density_id, m), rng);
}

EnsembleSpec EnsembleSpec::parse(const std::string& text) {
  EnsembleSpec spec;
  auto parse_int = [&text](const std::string& piece) {
    size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(piece, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad ensemble spec '" + text + "'");
    }
    if (used != piece.size()) {
      throw std::invalid_argument("bad ensemble spec '" + text + "'");
    }
    return value;
  };

  if (text == "bures-qubit") {
    spec.kind = Kind::BuresQubit;
    spec.system_dim = 2;
    return spec;
  }
  if (text == "hs-qubit") {
    spec.kind = Kind::HilbertSchmidtQubit;
    spec.system_dim = 2;
    return spec;
  }
  if (text.rfind("induced:", 0) == 0) {
    const std::string rest = text.substr(8);
    const size_t comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("bad ensemble spec '" + text + "' (expected induced:M,N)");
    }
    spec.kind = Kind::Induced;
    spec.system_dim = parse_int(rest.substr(0, comma));
    spec.ancilla_dim = parse_int(rest.substr(comma + 1));
    if (spec.system_dim < 1 || spec.ancilla_dim < 1) {
      throw std::invalid_argument("induced ensemble requires M >= 1, N >= 1");
    }
    return spec;
  }
  if (text.rfind("simplex:", 0) == 0) {
    const std::string rest = text.substr(8);
    const size_t comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("bad ensemble spec '" + text + "' (expected simplex:M,ID)");
    }
    spec.kind = Kind::SimplexDensity;
    spec.system_dim = parse_int(rest.substr(0, comma));
    spec.density_id = rest.substr(comma + 1);
    make_simplex_target(spec.density_id, spec.system_dim);  // validate eagerly
    return spec;
  }
  throw std::invalid_argument(
      "bad ensemble spec '" + text +
      "' (expected induced:M,N | bures-qubit | hs-qubit | simplex:M,ID)");
}

std::string EnsembleSpec::str() const {
  switch (kind) {
    case Kind::Induced:
      return "induced:" + std::to_string(system_dim) + "," + std::to_string(ancilla_dim);
    case Kind::BuresQubit:
      return "bures-qubit";
    case Kind::HilbertSchmidtQubit:
      return "hs-qubit";
    case Kind::SimplexDensity:
      return "simplex:" + std::to_string(system_dim) + "," + density_id;
  }
  return {};
}

int EnsembleSpec::spectrum_size() const {
  switch (kind) {
    case Kind::Induced:
      return system_dim;
    case Kind::BuresQubit:
    case Kind::HilbertSchmidtQubit:
      return 2;
    case Kind::SimplexDensity:
      return system_dim;
  }
  return 0;
}

bool EnsembleSpec::has_bloch() const {
  switch (kind) {
    case Kind::Induced:
      return system_dim == 2;
    case Kind::BuresQubit:
    case Kind::HilbertSchmidtQubit:
      return true;
    case Kind::SimplexDensity:
      return false;
  }
  return false;
}

EnsembleSample draw_sample(const EnsembleSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case EnsembleSpec::Kind::Induced: {
      const DensityMatrix rho =
          sample_induced(CompositeShape(spec.system_dim, spec.ancilla_dim), rng);
      Spectrum spectrum = eig_hermitian(rho).spectrum;
      std::optional<BlochVector> bloch;
      if (spec.system_dim == 2) bloch = bloch_from_density(rho);
      return {std::move(spectrum), bloch};
    }
    case EnsembleSpec::Kind::BuresQubit: {
      const BlochVector b = sample_bures_qubit(rng);
      const double r = b.radius();
      return {Spectrum({0.5 * (1.0 + r), 0.5 * (1.0 - r)}), b};
    }
    case EnsembleSpec::Kind::HilbertSchmidtQubit: {
      const BlochVector b = sample_hs_qubit(rng);
      const double r = b.radius();
      return {Spectrum({0.5 * (1.0 + r), 0.5 * (1.0 - r)}), b};
    }
    case EnsembleSpec::Kind::SimplexDensity: {
      return {sample_simplex_density(spec.system_dim, spec.density_id, rng), std::nullopt};
    }
  }
  throw std::logic_error("unreachable ensemble kind");
}

}  // namespace qmeasure
