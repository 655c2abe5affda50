#pragma once

#include <stdexcept>
#include <string>

namespace jcanyon {

enum class ErrorCode {
  UnknownMode,
  SectorOverflow,
  NoQubit,
  NormTooLarge,
  BadSubsystem,
  InvalidDensity,
  NormDrift,
  BasisMismatch,
  InvalidParams,
  DegenerateCoupling,
  BadSolidAngle,
  WrongExcitation,
  BadTheta,
  DegeneratePath,
  BadPath,
  VanishingOverlap,
  NonAdiabatic,
  CalibrationAmbiguous,
  CycleMismatch,
  DimensionBudget,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace jcanyon
