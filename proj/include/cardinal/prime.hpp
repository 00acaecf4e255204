#pragma once

#include <stdexcept>
#include <string>

namespace cardinal {

// A validated prime number. Everything downstream (valuations, Fermat
// quotients, wreath constructions) is parameterized by one of these, and
// constructing an invalid one throws immediately rather than letting a
// composite propagate into arithmetic that silently assumes primality.
class Prime {
public:
    explicit Prime(long value) : value_(value) {
        if (value < 2)
            throw std::invalid_argument("prime must be >= 2, got " + std::to_string(value));
        for (long d = 2; d * d <= value; ++d)
            if (value % d == 0)
                throw std::invalid_argument(std::to_string(value) + " is not prime");
    }

    long value() const { return value_; }

    friend bool operator==(const Prime& a, const Prime& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Prime& a, const Prime& b) { return a.value_ != b.value_; }

private:
    long value_;
};

} // namespace cardinal
