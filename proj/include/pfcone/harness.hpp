#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfcone/config.hpp"
#include "pfcone/operator.hpp"
#include "pfcone/report.hpp"

namespace pfcone {

enum class ExperimentKind { ConeAxioms, PfVerify, PerturbSweep, Schrodinger };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

/// `kind` and `seed` are required; `output` is optional. Every other key is a
/// kind-specific parameter.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ConeAxioms;
  std::uint64_t seed = 0;
  Config params;
  std::string output_path;

  static ExperimentConfig from_config(const Config& cfg);
  /// The inverse of from_config; echoed in report headers.
  Config to_config() const;
};

/// Runs the experiment. Rows are written in a fixed order regardless of `jobs`.
Report run(const ExperimentConfig& config, int jobs = 1);

enum class InstanceFlavor { Generic, PsdSimple, DegenerateTop };

std::string_view to_string(InstanceFlavor flavor);
InstanceFlavor parse_instance_flavor(const std::string& text);

/// generic: (G + G^T)/2. psd-simple: G G^T + 2 ||G G^T|| v v^T. degenerate-top:
/// Q diag(L, L, ...) Q^T with the rest of the spectrum in [0.1 L, 0.5 L);
/// requires dim >= 2.
SymmetricOperator generate_instance(InstanceFlavor flavor, Index dim, std::uint64_t seed);

/// Rows stating CertifiedFalse, re-derived from the echoed config and checked
/// with replay_violation.
struct ReplayOutcome {
  int replayed = 0;
  int reproduced = 0;
  std::vector<std::string> failures;
};

ReplayOutcome replay_report(const Report& report);

/// "r1; r2; ..." with comma-separated entries, or "file:<path>" in the
/// plain-text matrix format.
Matrix parse_inline_matrix(const std::string& text, const std::string& field);

}  // namespace pfcone
