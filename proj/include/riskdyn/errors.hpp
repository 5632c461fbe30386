#pragma once

#include <stdexcept>
#include <string>

namespace riskdyn {

/// Raised when input data or arguments violate a documented precondition.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an iterative numerical routine fails to converge or leaves its
/// feasible region.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace riskdyn
