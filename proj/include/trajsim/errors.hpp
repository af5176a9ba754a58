#pragma once

#include <stdexcept>
#include <string>

namespace trajsim {

// Error categories map onto the CLI exit codes: ParamError -> 1,
// DataError -> 2, ComputeError -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid arguments, unsupported measure/parameter combinations, bad usage.
class ParamError : public Error {
public:
    explicit ParamError(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent input data (files, networks, trajectories).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Failures arising during computation (unreachable vertices, undefined ratios).
class ComputeError : public Error {
public:
    explicit ComputeError(const std::string& msg) : Error(msg) {}
};

}  // namespace trajsim
