#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgb {

// Malformed input file. `line` is 1-based and refers to the offending line
// of the file being parsed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Bad run configuration: missing paths, mode/checkpoint mismatch, invalid
// flag combinations. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace sgb
