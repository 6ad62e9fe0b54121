#pragma once

#include <stdexcept>
#include <string>

namespace qbatt {

/// Bad user input: malformed config files, non-physical parameters.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A physics precondition of an operation does not hold (e.g. a charging
/// report requested for a map without equilibrium).
struct physics_error : std::runtime_error {
    explicit physics_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: eigensolver non-convergence, violated exact identities.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qbatt
