#pragma once

#include <cstdint>
#include <optional>

#include "pfcone/operator.hpp"

namespace pfcone {

/// splitmix64 stream. Uniform and Gaussian draws are built from it directly so
/// that results do not depend on the standard library's distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double gaussian();

  Vector gaussian_vector(Index n);
  /// Uniform on the unit sphere of R^n.
  Vector unit_vector(Index n);

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

/// Independent stream seed for task `counter` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

}  // namespace pfcone
