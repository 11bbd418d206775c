#include "qmeasure/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmeasure {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double gk(const RealFn& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  return GK::integrate(f, a, b, 15, rel_tol);
}

}  // namespace

double integrate(const RealFn& f, double a, double b, double rel_tol, EndpointFlags flags) {
  if (!(b > a)) return 0.0;
  const double mid = 0.5 * (a + b);
  double result = 0.0;

  if (flags.left_sqrt_singular) {
    // x = a + u^2, dx = 2u du; the 1/sqrt(x - a) factor cancels against u.
    const double hi = std::sqrt(mid - a);
    result += gk([&f, a](double u) { return f(a + u * u) * 2.0 * u; }, 0.0, hi, rel_tol);
  } else {
    result += gk(f, a, mid, rel_tol);
  }

  if (flags.right_sqrt_singular) {
    const double hi = std::sqrt(b - mid);
    result += gk([&f, b](double u) { return f(b - u * u) * 2.0 * u; }, 0.0, hi, rel_tol);
  } else {
    result += gk(f, mid, b, rel_tol);
  }
  return result;
}

double integrate_simplex2(const RealFn2& f, double rel_tol, bool boundary_sqrt_singular) {
  const double inner_tol = rel_tol * 0.1;
  EndpointFlags inner_flags;
  EndpointFlags outer_flags;
  if (boundary_sqrt_singular) {
    inner_flags = {true, true};   // l2 -> 0 and l3 -> 0
    outer_flags = {true, false};  // l1 -> 0; the inner integral vanishes smoothly at l1 -> 1
  }
  auto outer = [&](double l1) {
    return integrate([&f, l1](double l2) { return f(l1, l2); }, 0.0, 1.0 - l1, inner_tol,
                     inner_flags);
  };
  return integrate(outer, 0.0, 1.0, rel_tol, outer_flags);
}

double gauss_legendre(const RealFn& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

TabulatedCdf::TabulatedCdf(RealFn density, double a, double b, EndpointFlags flags, int panels)
    : density_(std::move(density)), a_(a), b_(b), flags_(flags) {
  if (!(b > a) || panels < 2) {
    throw std::invalid_argument("TabulatedCdf: need b > a and panels >= 2");
  }
  edges_.resize(static_cast<size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) {
    edges_[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / panels;
  }
  edges_.front() = a;
  edges_.back() = b;

  cumulative_.assign(static_cast<size_t>(panels) + 1, 0.0);
  for (int i = 0; i < panels; ++i) {
    EndpointFlags panel_flags;
    panel_flags.left_sqrt_singular = (i == 0) && flags.left_sqrt_singular;
    panel_flags.right_sqrt_singular = (i == panels - 1) && flags.right_sqrt_singular;
    const double mass = integrate(density_, edges_[static_cast<size_t>(i)],
                                  edges_[static_cast<size_t>(i) + 1], 1e-12, panel_flags);
    cumulative_[static_cast<size_t>(i) + 1] = cumulative_[static_cast<size_t>(i)] + mass;
  }
  total_ = cumulative_.back();
  if (!(total_ > 0.0) || !std::isfinite(total_)) {
    throw std::invalid_argument("TabulatedCdf: density does not have positive finite mass");
  }
}

double TabulatedCdf::operator()(double x) const {
  if (x <= a_) return 0.0;
  if (x >= b_) return 1.0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const size_t panel = static_cast<size_t>(std::distance(edges_.begin(), it)) - 1;
  EndpointFlags panel_flags;
  panel_flags.left_sqrt_singular = (panel == 0) && flags_.left_sqrt_singular;
  // A right singularity only matters when integrating all the way to b,
  // which the precomputed last panel already covers.
  const double partial = integrate(density_, edges_[panel], x, 1e-12, panel_flags);
  return (cumulative_[panel] + partial) / total_;
}

double TabulatedCdf::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("TabulatedCdf::quantile: p outside [0, 1]");
  }
  double lo = a_;
  double hi = b_;
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qmeasure
