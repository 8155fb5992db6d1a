#pragma once

#include <stdexcept>
#include <string>

namespace msda {

// Dimension or layer-shape mismatch between tensors/parameters.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid argument values: out-of-range labels, empty samples, bad sizes.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// NaN/Inf where finite values are required.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file content; message carries the line number.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Operation requested in a mode that cannot provide it
// (e.g. joint optimal risk without target labels).
class ModeError : public std::runtime_error {
public:
    explicit ModeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace msda
