#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace posdelay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (non-Metzler matrix, non-positive weight, NaN entry).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Field evaluation left its admissible domain (negative sqrt argument, division by zero).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operation was called on inputs that do not satisfy its precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ReducibleMatrixError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A delay signal produced a value outside [0, declared bound].
class DelayBoundError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent system document.
class InputError : public Error {
public:
    using Error::Error;
};

enum class ParseErrorKind { Syntax, UnknownIdentifier, Arity, VariableRange };

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
        : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    ParseErrorKind kind_;
    std::size_t offset_;
};

} // namespace posdelay
