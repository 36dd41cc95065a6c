#pragma once

#include <stdexcept>
#include <string>

namespace shotladder {

// Base class for all toolkit failures. CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed files, violated invariants, missing columns.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Malformed binary payloads (model files, y4m streams).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

} // namespace shotladder
