#pragma once

#include <stdexcept>
#include <string>

namespace minimod {

/// Invalid configuration supplied by the user (bad grid size, unknown
/// propagator, damping layers too thick, ...). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Physically inconsistent input data (vs >= vp, non-finite samples, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Simulation blew up (NaN/Inf detected). Carries the time step.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& msg, int step)
        : std::runtime_error(msg + " at time step " + std::to_string(step)), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

} // namespace minimod
