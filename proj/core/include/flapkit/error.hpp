#pragma once

#include <stdexcept>
#include <string>

namespace flapkit {

// Base class for all flapkit failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter left the admissible domain (|A| >= 0.5, negative frequency, ...).
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

// Extended phase dynamics rejected: the modulation rate drove the numerator
// non-positive, which would stall or reverse the phase.
class ModulationRateError : public Error {
public:
    using Error::Error;
};

// Numerical failure inside a solver or fit (singular or near-singular system).
class NumericalError : public Error {
public:
    using Error::Error;
};

// Configuration file could not be parsed.
class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& msg, int line, int col)
        : Error(msg), line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// Configuration parsed but violates a module invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace flapkit
