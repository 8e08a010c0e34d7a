#include "pfcone/rng.hpp"

#include <cmath>
#include <numbers>

namespace pfcone {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::gaussian() {
  if (spare_) {
    const double g = *spare_;
    spare_.reset();
    return g;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Vector SplitMix64::gaussian_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gaussian();
  return v;
}

Vector SplitMix64::unit_vector(Index n) {
  Vector v = gaussian_vector(n);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian_vector(n);
    norm = v.norm();
  }
  return v / norm;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  SplitMix64 mix(master ^ (0xd1b54a32d192ed03ULL * (counter + 1)));
  return mix.next();
}

}  // namespace pfcone
