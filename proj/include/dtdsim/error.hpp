#pragma once

#include <stdexcept>
#include <string>

namespace dtdsim {

// Bad user input: config files, CLI values, malformed scenario definitions.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Anything that goes wrong after configuration was accepted (exit code 1).
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dtdsim
