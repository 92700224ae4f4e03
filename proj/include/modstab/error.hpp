#pragma once

#include <stdexcept>
#include <string>

namespace modstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value could not be evaluated (non-finite input or result).
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double value)
        : Error(what), value_(value) {}
    double value() const noexcept { return value_; }

private:
    double value_;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Invalid equation/control/modular parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Overflow while forming a radical argument; `coordinate()` names x, y or z.
class RangeError : public Error {
public:
    RangeError(const std::string& what, std::string coordinate)
        : Error(what), coordinate_(std::move(coordinate)) {}
    const std::string& coordinate() const noexcept { return coordinate_; }

private:
    std::string coordinate_;
};

/// A scaled approximant left the finite range at step `step()`.
class SaturationError : public Error {
public:
    SaturationError(const std::string& what, int step) : Error(what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

/// A construction was called with inputs that violate its structural contract.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// The parameters fall outside the convergent regime. `value()` carries the
/// offending ratio, contraction constant or threshold.
class RegimeError : public Error {
public:
    RegimeError(const std::string& what, double value) : Error(what), value_(value) {}
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// A control function has no known geometric decay, so no tail can be certified.
class TailUnknownError : public Error {
public:
    using Error::Error;
};

/// A sampled hypothesis (e.g. the defect bound) failed.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace modstab
