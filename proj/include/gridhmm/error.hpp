#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridhmm {

// Base for every error raised by the library. The CLI maps these onto exit
// codes: IoError -> 2, everything else -> 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or otherwise out-of-domain numeric argument.
class DomainError : public Error {
public:
    using Error::Error;
};

// A parameter violates a documented precondition (sigma <= 0, bad weights,
// length mismatch, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Prior-adjusted thresholds came out inverted, leaving no middle region.
class DegenerateConfigError : public Error {
public:
    DegenerateConfigError(double delta_neg_zero, double delta_zero_pos);

    double delta_neg_zero() const { return delta_neg_zero_; }
    double delta_zero_pos() const { return delta_zero_pos_; }

private:
    double delta_neg_zero_;
    double delta_zero_pos_;
};

// An observed symbol has zero probability under every state at some step.
class InfeasibleObservationError : public Error {
public:
    InfeasibleObservationError(std::size_t step);

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

// Transition matrix is not primitive (reducible or periodic).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Exhaustive search requested for a sequence too long to enumerate.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

// Configuration or input file failed validation; carries every violation.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gridhmm
