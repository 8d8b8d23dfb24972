#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace osim {

enum class ErrorKind {
  UnknownGenerator,
  UnknownDistribution,
  ParamOutOfDomain,
  DegenerateDenominator,
  GridTooCoarse,
  GridOutsideSupport,
  DerivativeUnavailable,
  RootNotBracketed,
  InvalidGamma,
  PresetNeedsIndependence,
  UnknownPreset,
  SupportExhausted,
  CumHazardOverflow,
  NotIncreasing,
  InvalidModel,
  UnsupportedMode,
  NonAnalyticModel,
  DimensionMismatch,
  LengthMismatch,
  NonPositiveEntry,
  EmptySample,
  UnknownScenario,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; `kind()` names the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace osim
