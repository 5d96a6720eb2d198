#pragma once

#include <stdexcept>
#include <string>

namespace hnkdv {

// Bad user input: malformed config, unknown keys, invalid parameters.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failure: non-finite state, solver blow-up, singular
// system.  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hnkdv
