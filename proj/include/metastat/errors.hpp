#pragma once

#include <stdexcept>
#include <string>

namespace metastat {

/// Numerical failure (integrator breakdown, divergence, loss of bracketing...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation requested inside a region where the map is singular
/// (e.g. the equilibrium guard ball, where the return time diverges).
class SingularityError : public NumericalError {
public:
    explicit SingularityError(const std::string& what) : NumericalError(what) {}
};

/// Scheme step size violates a stability/solvability constraint; the message
/// carries the suggested remedy (halve the step).
class StepSizeError : public NumericalError {
public:
    explicit StepSizeError(const std::string& what) : NumericalError(what) {}
};

/// Malformed or inconsistent run configuration / input files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace metastat
