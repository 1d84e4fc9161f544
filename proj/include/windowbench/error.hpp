#pragma once

#include <stdexcept>
#include <string>

namespace wb {

// User-correctable problems: bad flags, unreadable config, malformed input
// files. The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariants (dimension mismatches, impossible states). The
// CLI maps these to exit code 2.
class InvariantError : public std::logic_error {
public:
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace wb
