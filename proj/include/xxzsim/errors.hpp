#pragma once

#include <stdexcept>
#include <string>

namespace xxzsim {

// Exit codes reported by the CLI (see README).
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    domain_error = 3,
    numeric_error = 4,
};

// Bad run configuration: unknown keys, malformed values, missing files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside an operation's domain (zero U, negative density, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure at runtime (lost norm, non-finite values, ...).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace xxzsim
