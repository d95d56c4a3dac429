#pragma once

#include <stdexcept>
#include <string>

namespace voiceml {

// Error taxonomy shared by the library and the CLI exit-code mapping.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument to an operation (violated precondition).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// Invalid configuration (bad key, bad value, inconsistent settings).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed or unusable input data (bad WAV chunk, bad manifest line, ...).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// An iterative solver ran out of its iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double gap)
        : Error(msg), duality_gap(gap) {}
    double duality_gap;
};

// Filesystem failures, reported with the offending path.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace voiceml
