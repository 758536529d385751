#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ivkg {

// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that violates a structural invariant (dangling id, duplicate edge, ...).
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Unknown node id or column name.
class LookupError : public Error {
public:
    using Error::Error;
};

// Caller passed arguments outside an operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Rank deficiency or a degenerate numeric quantity.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace ivkg
