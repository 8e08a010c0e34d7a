#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pfcone {

enum class ErrorKind {
  InvalidArgument,
  NotSymmetric,
  NonFinite,
  DimensionMismatch,
  NonConvergence,
  DegenerateTop,
  DegenerateBottom,
  NegativeTime,
  CorrespondenceViolation,
  NotOutside,
  NotBoundary,
  NotInCone,
  AxisNotEigenvector,
  PrereqFailed,
  ContourHitsSpectrum,
  GapCollapsed,
  BudgetViolated,
  OutsideTheoremScope,
  ContractViolation,
  AsymmetricPotential,
  NotRealCompatible,
  TrivialCoupling,
  ConfigInvalid,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the toolkit carries a machine-readable kind so the
/// CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pfcone
