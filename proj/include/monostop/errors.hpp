#pragma once

#include <stdexcept>
#include <string>

namespace monostop {

// Bad arguments, malformed configs, unsupported parameter combinations.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation failed numerically (non-finite result, solver did not converge).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace monostop
