#pragma once

#include <cstdint>
#include <iosfwd>

#include "pfcone/report.hpp"

namespace pfcone {

struct AcceptanceOptions {
  std::uint64_t seed = 20261016;
  int jobs = 1;
  /// Re-runs every criterion and compares the serialized rows byte for byte.
  bool check_determinism = true;
  /// Receives one pass/fail line per criterion with wall-clock timings.
  std::ostream* log = nullptr;
};

/// The acceptance suite. One row per criterion in table "acceptance";
/// `violations` counts failed criteria. Timings never enter the report.
Report run_acceptance(const AcceptanceOptions& options);

}  // namespace pfcone
