#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchrec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidSparsity : public Error {
public:
    using Error::Error;
};

class InvalidThreshold : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// Operator with no spectral content (e.g. an all-zero sensing matrix).
class DegenerateOperator : public Error {
public:
    using Error::Error;
};

/// A solver produced a NaN or Inf; carries the iteration where it happened.
class NumericalDivergence : public Error {
public:
    NumericalDivergence(std::size_t iteration, const std::string& what)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class ZeroResidual : public Error {
public:
    using Error::Error;
};

/// Selected atoms are (numerically) linearly dependent.
class DegenerateAtom : public Error {
public:
    using Error::Error;
};

/// The explicit Kronecker oracle refused an operator that is too large.
class CapacityError : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Malformed matrix text; line is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

}  // namespace sketchrec
