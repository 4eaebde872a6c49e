#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace qbatt {

// Bad input: malformed config, violated parameter invariant, wrong dimension.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A run diagnostic tripped (trace drift, positivity, weight clamping).
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form of v, for messages.
inline std::string to_text(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace qbatt
