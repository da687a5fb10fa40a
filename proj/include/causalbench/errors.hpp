#pragma once

#include <stdexcept>
#include <string>

namespace causalbench {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a data invariant (shape, NaN, negative error, model set).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A named model or key is absent.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Request exceeds a hard size limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the file and 1-based line.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Well-formed input with the wrong columns.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// An estimator cannot be fitted on the given realization.
class EstimationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace causalbench
