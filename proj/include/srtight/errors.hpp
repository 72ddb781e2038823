/**
 * @file errors.hpp
 * @brief Error kinds raised by the library. Each maps to one CLI exit code.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace srtight {

enum class ErrorKind {
    FrameSingular,
    ContactViolation,
    StepFailure,
    DomainExit,
    ImmersionFailure,
    NotOvertwistedWithinHorizon,
    ComplexB,
    Parse,
    InvalidInput,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::FrameSingular: return "FrameSingular";
    case ErrorKind::ContactViolation: return "ContactViolation";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::DomainExit: return "DomainExit";
    case ErrorKind::ImmersionFailure: return "ImmersionFailure";
    case ErrorKind::NotOvertwistedWithinHorizon: return "NotOvertwistedWithinHorizon";
    case ErrorKind::ComplexB: return "ComplexB";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double where = 0.0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), where_(where) {}
    ErrorKind kind() const { return kind_; }
    /// Radius or coordinate at which the failure occurred, when meaningful.
    double where() const { return where_; }

private:
    ErrorKind kind_;
    double where_;
};

} // namespace srtight
