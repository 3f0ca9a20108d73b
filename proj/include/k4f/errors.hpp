#pragma once

#include <stdexcept>
#include <string>

namespace k4f {

// Process exit codes used by the CLI.
enum class ExitCode : int {
    success = 0,
    config_error = 2,
    numeric_error = 3,
    partial_results = 4,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain a quantity is defined on (e.g. a pair that
// was already traversed, an x beyond the trajectory table).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace k4f
