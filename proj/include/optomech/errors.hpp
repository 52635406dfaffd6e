#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

/// Parameter outside its physical domain (negative mass, n <= 1, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The physics has no valid answer for the request: unstable dynamics where a
/// steady state is required, an inverted sphere trap, an empty stability bracket.
class PhysicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed (eigen-solver, singular system, no root found).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration text. Carries the 1-based line number (0 when the
/// error is not tied to a line) and the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0, std::string key = {})
        : std::runtime_error(format(message, line, key)), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& message, int line, const std::string& key) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + message;
    }

    int line_;
    std::string key_;
};

}  // namespace optomech
