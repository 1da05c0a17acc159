#include "solitonforge/errors.hpp"

namespace solitonforge {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoGroundState: return "NoGroundState";
    case ErrorKind::UnderResolved: return "UnderResolved";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::SideConditionFailed: return "SideConditionFailed";
    case ErrorKind::RadicandNegative: return "RadicandNegative";
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::WindowTooNoisy: return "WindowTooNoisy";
    case ErrorKind::WindowEmpty: return "WindowEmpty";
    case ErrorKind::FitFailure: return "FitFailure";
    case ErrorKind::VelocityNotQuantized: return "VelocityNotQuantized";
    case ErrorKind::R1OutOfRange: return "R1OutOfRange";
    case ErrorKind::DivergentSeries: return "DivergentSeries";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoContraction: return "NoContraction";
    case ErrorKind::TailTooLarge: return "TailTooLarge";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

SolverError::SolverError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace solitonforge
