#pragma once
#include <stdexcept>
#include <string>

namespace spinbus {

// Bad physical/geometric parameters or malformed input. CLI exit code 2.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem size over a documented cap. CLI exit code 3.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver failed to reach tolerance. CLI exit code 3.
struct ConvergenceError : std::runtime_error {
    double best_residual;
    ConvergenceError(const std::string& msg, double res)
        : std::runtime_error(msg), best_residual(res) {}
};

} // namespace spinbus
