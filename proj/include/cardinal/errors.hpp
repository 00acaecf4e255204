#pragma once

#include <stdexcept>
#include <string>

namespace cardinal {

// Raised when a documented size or precision guard would be exceeded.
// The CLI maps this family to exit code 3.
class guard_error : public std::runtime_error {
public:
    explicit guard_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when truncated p-adic arithmetic runs out of digits, e.g. taking a
// Fermat quotient of a precision-1 value.
class precision_error : public guard_error {
public:
    explicit precision_error(const std::string& what) : guard_error(what) {}
};

// Raised by the expression parser; carries the offset of the offending token.
// The CLI maps parse and usage errors to exit code 2.
class parse_error : public std::invalid_argument {
public:
    parse_error(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

} // namespace cardinal
