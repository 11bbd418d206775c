#pragma once

#include <functional>
#include <vector>

namespace qmeasure {

/// Declares integrable 1/sqrt endpoint singularities so the integrator can
/// substitute them away before applying adaptive Gauss-Kronrod.
struct EndpointFlags {
  bool left_sqrt_singular = false;
  bool right_sqrt_singular = false;
};

using RealFn = std::function<double(double)>;
using RealFn2 = std::function<double(double, double)>;

/// Adaptive G7/K15 on [a, b]. Singular endpoints are handled by the
/// substitution u = sqrt(x - a) (resp. u = sqrt(b - x)) on the adjacent
/// half-interval, which removes an integrable 1/sqrt factor exactly.
double integrate(const RealFn& f, double a, double b, double rel_tol = 1e-10,
                 EndpointFlags flags = {});

/// Integral of f(l1, l2) over the 2-simplex {l1, l2 >= 0, l1 + l2 <= 1}
/// (flat measure, l3 = 1 - l1 - l2). With boundary_sqrt_singular set, the
/// integrand may carry (l1 l2 l3)^(-1/2) boundary factors.
double integrate_simplex2(const RealFn2& f, double rel_tol = 1e-8,
                          bool boundary_sqrt_singular = false);

/// Non-adaptive Gauss-Legendre, exact for polynomials of degree <= 2n-1
/// (n = 20). Used where integrands are piecewise polynomial.
double gauss_legendre(const RealFn& f, double a, double b);

/// CDF of a (non-negative) density on [a, b], tabulated on equal panels
/// with per-panel Gauss-Kronrod; queries re-integrate only inside one
/// panel. Normalized so that cdf(b) = 1.
class TabulatedCdf {
 public:
  TabulatedCdf(RealFn density, double a, double b, EndpointFlags flags = {},
               int panels = 512);

  double operator()(double x) const;
  double total_mass() const { return total_; }
  /// Inverse CDF by bisection to 1e-12.
  double quantile(double p) const;

 private:
  RealFn density_;
  double a_, b_;
  EndpointFlags flags_;
  std::vector<double> edges_;
  std::vector<double> cumulative_;  // cumulative_[i] = integral over panels [0, i)
  double total_;
};

}  // namespace qmeasure
