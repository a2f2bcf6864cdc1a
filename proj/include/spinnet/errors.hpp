#pragma once

#include <stdexcept>
#include <string>

namespace spinnet {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed network topology (bad bonds, overlapping qubits, disconnected graph).
struct InvalidTopology : Error {
    explicit InvalidTopology(const std::string& what) : Error(what) {}
};

// Operator/state defined on different bases or sizes.
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

// Propagator failed to reach the requested tolerance.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

// Scattering products still overlap the interaction region at the requested
// measurement time; retry with a longer evolution.
struct SeparationError : Error {
    SeparationError(const std::string& what, double suggested_time)
        : Error(what), suggested_time(suggested_time) {}
    double suggested_time;
};

// Invalid run configuration (CLI / config file level).
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace spinnet
