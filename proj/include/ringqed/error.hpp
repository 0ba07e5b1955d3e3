// error.hpp: error kinds raised by the ringqed library

#pragma once

#include <stdexcept>
#include <string>

namespace ringqed {

enum class ErrorKind {
    NonPositive,
    OddModeCount,
    NegativeCoupling,
    ConvergenceFailure,
    DimensionMismatch,
    GridTooLarge,
    StepTooLarge,
    EmptyWindow,
    NonPositiveAmplitude,
    AllMasked,
    HorizonTooShort,
    NoCrossing,
    Precondition,
    ParseError,
    UnknownKey,
    ValidationError,
    IoError,
    UnknownKind,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::OddModeCount: return "OddModeCount";
    case ErrorKind::NegativeCoupling: return "NegativeCoupling";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::NonPositiveAmplitude: return "NonPositiveAmplitude";
    case ErrorKind::AllMasked: return "AllMasked";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownKind: return "UnknownKind";
    }
    return "Unknown";
}

/// Library error. `kind()` identifies the failure; `detail()` names the
/// offending field, line, or parameter set.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail)
        , kind_(kind)
        , detail_(std::move(detail)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

    /// True for errors caused by user input rather than numerics or I/O.
    bool is_validation() const noexcept {
        switch (kind_) {
        case ErrorKind::NonPositive:
        case ErrorKind::OddModeCount:
        case ErrorKind::NegativeCoupling:
        case ErrorKind::ParseError:
        case ErrorKind::UnknownKey:
        case ErrorKind::ValidationError:
        case ErrorKind::UnknownKind:
        case ErrorKind::Precondition:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace ringqed
