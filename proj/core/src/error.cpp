#include "ics/error.hpp"

namespace ics {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Singular: return "Singular";
    case Errc::ZeroDistance: return "ZeroDistance";
    case Errc::SubsetTooSmall: return "SubsetTooSmall";
    case Errc::BadCount: return "BadCount";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::DegeneratePolynomial: return "DegeneratePolynomial";
    case Errc::InvalidCenters: return "InvalidCenters";
    case Errc::InvalidSetup: return "InvalidSetup";
    case Errc::NoCrossing: return "NoCrossing";
    case Errc::NonMonotoneCrossing: return "NonMonotoneCrossing";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::UnknownConfig: return "UnknownConfig";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace ics
