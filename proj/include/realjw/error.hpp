#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace realjw {

enum class ErrorCode {
    even_denominator,
    division_by_even,
    table_mismatch,
    non_nilpotent_substitution,
    bad_leading_term,
    unsupported_convention,
    insufficient_log_depth,
    non_integral_coefficient,
    cap_too_small,
    non_termination,
    constant_term,
    unsupported_space,
    not_in_basis,
    composition_failure,
    not_homogeneous,
    out_of_model_scope,
    side_condition_failed,
    cap_exceeded,
    io_failure,
    invalid_argument,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::even_denominator: return "EvenDenominator";
    case ErrorCode::division_by_even: return "DivisionByEven";
    case ErrorCode::table_mismatch: return "TableMismatch";
    case ErrorCode::non_nilpotent_substitution: return "NonNilpotentSubstitution";
    case ErrorCode::bad_leading_term: return "BadLeadingTerm";
    case ErrorCode::unsupported_convention: return "UnsupportedConvention";
    case ErrorCode::insufficient_log_depth: return "InsufficientLogDepth";
    case ErrorCode::non_integral_coefficient: return "NonIntegralCoefficient";
    case ErrorCode::cap_too_small: return "CapTooSmall";
    case ErrorCode::non_termination: return "NonTermination";
    case ErrorCode::constant_term: return "ConstantTerm";
    case ErrorCode::unsupported_space: return "UnsupportedSpace";
    case ErrorCode::not_in_basis: return "NotInBasis";
    case ErrorCode::composition_failure: return "CompositionFailure";
    case ErrorCode::not_homogeneous: return "NotHomogeneous";
    case ErrorCode::out_of_model_scope: return "OutOfModelScope";
    case ErrorCode::side_condition_failed: return "SideConditionFailed";
    case ErrorCode::cap_exceeded: return "CapExceeded";
    case ErrorCode::io_failure: return "IOFailure";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Single exception type for the library; the code identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace realjw
