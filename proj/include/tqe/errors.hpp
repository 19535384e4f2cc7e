#pragma once

#include <stdexcept>
#include <string>

// Error taxonomy. configuration_error maps to CLI exit code 2, every other
// failure of a numeric contract maps to exit code 1.

namespace tqe {

struct configuration_error : std::runtime_error {
    explicit configuration_error(const std::string& msg)
        : std::runtime_error("configuration error: " + msg) {}
};

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg)
        : std::runtime_error("domain error: " + msg) {}
};

struct singularity_error : std::runtime_error {
    explicit singularity_error(const std::string& msg)
        : std::runtime_error("singularity: " + msg) {}
};

struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& msg)
        : std::runtime_error("precondition violated: " + msg) {}
};

// Quadrature or finite-difference accuracy contract not met.
struct tolerance_error : std::runtime_error {
    explicit tolerance_error(const std::string& msg)
        : std::runtime_error("tolerance not met: " + msg) {}
};

// Null-space solve found a degenerate (non-1D) kernel.
struct ambiguity_error : std::runtime_error {
    explicit ambiguity_error(const std::string& msg)
        : std::runtime_error("ambiguous solution: " + msg) {}
};

// Fock-space truncation failed its tail-population acceptance test.
struct truncation_error : std::runtime_error {
    explicit truncation_error(const std::string& msg)
        : std::runtime_error("truncation rejected: " + msg) {}
};

}  // namespace tqe
