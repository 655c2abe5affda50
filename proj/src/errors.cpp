#include "jcanyon/errors.hpp"

namespace jcanyon {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::SectorOverflow: return "SectorOverflow";
    case ErrorCode::NoQubit: return "NoQubit";
    case ErrorCode::NormTooLarge: return "NormTooLarge";
    case ErrorCode::BadSubsystem: return "BadSubsystem";
    case ErrorCode::InvalidDensity: return "InvalidDensity";
    case ErrorCode::NormDrift: return "NormDrift";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorCode::BadSolidAngle: return "BadSolidAngle";
    case ErrorCode::WrongExcitation: return "WrongExcitation";
    case ErrorCode::BadTheta: return "BadTheta";
    case ErrorCode::DegeneratePath: return "DegeneratePath";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::VanishingOverlap: return "VanishingOverlap";
    case ErrorCode::NonAdiabatic: return "NonAdiabatic";
    case ErrorCode::CalibrationAmbiguous: return "CalibrationAmbiguous";
    case ErrorCode::CycleMismatch: return "CycleMismatch";
    case ErrorCode::DimensionBudget: return "DimensionBudget";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace jcanyon
