#pragma once

#include <stdexcept>
#include <string>

namespace longmem {

/// Malformed or unusable input data (bad CSV, non-positive prices, ...).
/// CLI exit code 1.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate data or a numerical failure (zero variance, singular design).
/// CLI exit code 2.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or parameter combination. CLI exit code 3.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace longmem
