#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spotvol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// The Jacobi eigensolver exhausted its sweep budget.
class IterationLimitError : public Error {
public:
    using Error::Error;
};

/// QV/bipower evaluation time whose window does not fit inside [0, T].
class OutOfWindowError : public Error {
public:
    using Error::Error;
};

/// Estimation window contains too few increments to form the estimator.
class DegenerateWindowError : public Error {
public:
    using Error::Error;
};

/// Requested time is not on the simulation grid.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV input; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input parsed but violates a data invariant (irregular grid, NaN, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Experiment/CLI configuration rejected before any computation.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace spotvol
