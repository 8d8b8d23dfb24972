#include "osim/error.hpp"

namespace osim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::UnknownDistribution: return "UnknownDistribution";
    case ErrorKind::ParamOutOfDomain: return "ParamOutOfDomain";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridOutsideSupport: return "GridOutsideSupport";
    case ErrorKind::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::InvalidGamma: return "InvalidGamma";
    case ErrorKind::PresetNeedsIndependence: return "PresetNeedsIndependence";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::SupportExhausted: return "SupportExhausted";
    case ErrorKind::CumHazardOverflow: return "CumHazardOverflow";
    case ErrorKind::NotIncreasing: return "NotIncreasing";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::UnsupportedMode: return "UnsupportedMode";
    case ErrorKind::NonAnalyticModel: return "NonAnalyticModel";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace osim
