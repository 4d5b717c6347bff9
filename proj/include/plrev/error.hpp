// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plrev {

enum class errc {
  division_by_zero,
  field_mismatch,
  unsupported_coefficient,
  empty_slopes,
  mixed_slope_signs,
  zero_slope,
  unsorted_breakpoints,
  mixed_monotonicity,
  orientation_error,
  precondition_failed,
  internal_verification_failed,
  endpoint_mismatch,
  not_monotone,
  has_fixed_point,
  non_discrete_breakpoints,
  non_positive_parameter,
  not_ple,
  parse_error,
  verification_failed,
};

constexpr std::string_view to_string(errc c) noexcept {
  switch (c) {
    case errc::division_by_zero: return "DivisionByZero";
    case errc::field_mismatch: return "FieldMismatch";
    case errc::unsupported_coefficient: return "UnsupportedCoefficient";
    case errc::empty_slopes: return "EmptySlopes";
    case errc::mixed_slope_signs: return "MixedSlopeSigns";
    case errc::zero_slope: return "ZeroSlope";
    case errc::unsorted_breakpoints: return "UnsortedBreakpoints";
    case errc::mixed_monotonicity: return "MixedMonotonicity";
    case errc::orientation_error: return "OrientationError";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::internal_verification_failed: return "InternalVerificationFailed";
    case errc::endpoint_mismatch: return "EndpointMismatch";
    case errc::not_monotone: return "NotMonotone";
    case errc::has_fixed_point: return "HasFixedPoint";
    case errc::non_discrete_breakpoints: return "NonDiscreteBreakpoints";
    case errc::non_positive_parameter: return "NonPositiveParameter";
    case errc::not_ple: return "NotPLE";
    case errc::parse_error: return "ParseError";
    case errc::verification_failed: return "VerificationFailed";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace plrev
