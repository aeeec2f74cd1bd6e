#pragma once

#include <stdexcept>
#include <string>

namespace entroplace {

// Thrown for malformed configuration values or flag combinations.  Maps to
// CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when inputs are missing, unreadable, or carry too few samples for
// the requested fit.  Maps to CLI exit code 3.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a numeric routine cannot proceed (factorization failure,
// singular solve, divergent training).  Maps to CLI exit code 4.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace entroplace
