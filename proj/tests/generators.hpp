#pragma once

// Seeded generators for the property tests.

#include <cstdint>

#include "pfcone/operator.hpp"
#include "pfcone/rng.hpp"

namespace gen {

inline pfcone::Matrix gaussian_matrix(pfcone::SplitMix64& rng, pfcone::Index n) {
  pfcone::Matrix g(n, n);
  for (pfcone::Index j = 0; j < n; ++j) g.col(j) = rng.gaussian_vector(n);
  return g;
}

inline pfcone::SymmetricOperator symmetric(pfcone::SplitMix64& rng, pfcone::Index n) {
  const pfcone::Matrix g = gaussian_matrix(rng, n);
  return pfcone::SymmetricOperator(0.5 * (g + g.transpose()));
}

inline pfcone::SymmetricOperator psd(pfcone::SplitMix64& rng, pfcone::Index n) {
  const pfcone::Matrix g = gaussian_matrix(rng, n);
  const pfcone::Matrix m = g * g.transpose();
  return pfcone::SymmetricOperator(0.5 * (m + m.transpose()));
}

/// Q diag(d) Q^T with Q a random orthogonal matrix.
inline pfcone::SymmetricOperator with_spectrum(pfcone::SplitMix64& rng, const pfcone::Vector& d) {
  const pfcone::Index n = d.size();
  const pfcone::Matrix q = Eigen::HouseholderQR<pfcone::Matrix>(gaussian_matrix(rng, n)).householderQ();
  const pfcone::Matrix m = q * d.asDiagonal() * q.transpose();
  return pfcone::SymmetricOperator(0.5 * (m + m.transpose()));
}

inline pfcone::Index dim(pfcone::SplitMix64& rng, int lo, int hi) {
  return lo + static_cast<pfcone::Index>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace gen
