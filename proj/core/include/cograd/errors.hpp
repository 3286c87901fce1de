#pragma once

#include <stdexcept>
#include <string>

namespace cograd {

/// Bad user input: malformed probability matrices, empty grids, config typos.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Scenario/config file errors. CLI maps these to exit code 2.
class ConfigError : public InvalidInput {
public:
    explicit ConfigError(const std::string& what) : InvalidInput(what) {}
};

/// Numerical breakdown (singular innovation covariance, failed Cholesky, ...).
/// CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cograd
