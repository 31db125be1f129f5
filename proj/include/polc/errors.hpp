#pragma once

#include <stdexcept>
#include <string>

namespace polc {

// Thrown when an algorithm fails numerically (eigensolver non-convergence,
// phase-resolution guard, spectrum mismatch). Distinct from std::invalid_argument,
// which is reserved for bad parameters/config, so callers can map the two onto
// different exit codes.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace polc
