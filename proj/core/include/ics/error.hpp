#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ics {

enum class Errc {
  NotPositiveDefinite,
  NoConvergence,
  DimensionMismatch,
  InvalidArgument,
  Singular,
  ZeroDistance,
  SubsetTooSmall,
  BadCount,
  InvalidSpec,
  DegeneratePolynomial,
  InvalidCenters,
  InvalidSetup,
  NoCrossing,
  NonMonotoneCrossing,
  EmptyInput,
  UnknownConfig,
  UnknownPreset,
  ConfigParse,
  ParseError,
};

std::string_view errc_name(Errc code) noexcept;

// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ics
