#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace solitonforge {

enum class ErrorKind {
  InvalidArgument,
  QuadratureFailure,
  NoGroundState,
  UnderResolved,
  NoSignChange,
  SideConditionFailed,
  RadicandNegative,
  NonMonotone,
  WindowTooNoisy,
  WindowEmpty,
  FitFailure,
  VelocityNotQuantized,
  R1OutOfRange,
  DivergentSeries,
  NonFinite,
  NoContraction,
  TailTooLarge,
  PreconditionFailed,
  Infeasible,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every recoverable failure in the library is reported through this type;
/// `kind()` is the machine-readable tag, `what()` the diagnostic.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace solitonforge
