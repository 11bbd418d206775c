#include "qmeasure/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmeasure {

namespace {

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

// Stafford "Mix13" finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Murmur3 finalizer, then the Steele-Lea-Flood fixup: gamma must be odd
// and its bit-pair transitions not too sparse.
std::uint64_t mix_gamma(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  z |= 1ULL;
  if (std::popcount(z ^ (z >> 1)) < 24) {
    z ^= 0xaaaaaaaaaaaaaaaaULL;
  }
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t base = seed + golden_gamma * stream_id;
  state_ = mix64(base);
  gamma_ = mix_gamma(base + golden_gamma);
}

std::uint64_t RngStream::next_u64() {
  state_ += gamma_;
  return mix64(state_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open01() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::pair<double, double> RngStream::next_gaussian_pair() {
  const double u1 = next_open01();
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double RngStream::next_gaussian() { return next_gaussian_pair().first; }

std::complex<double> RngStream::next_complex_gaussian() {
  const auto [re, im] = next_gaussian_pair();
  return {re, im};
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) {
    throw std::domain_error("RngStream::next_below: bound must be >= 1");
  }
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v = next_u64();
  while (v >= limit) {
    v = next_u64();
  }
  return v % bound;
}

}  // namespace qmeasure
