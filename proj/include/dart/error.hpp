#pragma once

#include <stdexcept>
#include <string>

namespace dart {

// Base of every error raised by the toolkit. The CLI maps ValidationError
// subclasses to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class ValidationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "validation"; }
};

// Input outside the region where a model is valid (e.g. linear lift range).
class RangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "range"; }
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "config"; }
};

class ParameterError : public ValidationError {
public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "parameter"; }
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "domain"; }
};

class ExtrapolationError : public ValidationError {
public:
    using ValidationError::ValidationError;
    const char* kind() const noexcept override { return "extrapolation"; }
};

class InfeasibleError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "infeasible"; }
};

class UndefinedError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "undefined"; }
};

class SimulationFault : public Error {
public:
    SimulationFault(long tick, const std::string& cause)
        : Error("simulation fault at tick " + std::to_string(tick) + ": " + cause),
          tick_(tick),
          cause_(cause) {}
    const char* kind() const noexcept override { return "simulation"; }
    long tick() const noexcept { return tick_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    long tick_;
    std::string cause_;
};

}  // namespace dart
