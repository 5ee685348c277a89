#pragma once

#include <stdexcept>
#include <string>

namespace sburgers {

/// Base of every error raised by the library. The CLI maps all of these to
/// exit code 1; quantitative failures are reported, never thrown.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t < 0, nu <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Grid/mode-count mismatch in the spectral transforms.
class GridError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration: mismatched step sizes, bad scheme name, etc.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A time that does not fall on the noise slot grid.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Non-finite state during time stepping.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// The Picard fixed-point iteration stopped contracting.
class OracleDivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace sburgers
