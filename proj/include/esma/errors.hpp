#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace esma {

/// Malformed textual input (constant labels, polynomials, JSON payloads).
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A convergent or Mobius evaluation hit a zero denominator.
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, std::size_t depth)
        : std::domain_error(what + " (depth " + std::to_string(depth) + ")"), depth_(depth) {}
    std::size_t depth() const noexcept { return depth_; }

private:
    std::size_t depth_;
};

/// Not enough digits available to resolve the requested quantity.
class PrecisionError : public std::runtime_error {
public:
    explicit PrecisionError(const std::string& what, long achieved = -1)
        : std::runtime_error(what), achieved_(achieved) {}
    long achieved() const noexcept { return achieved_; }

private:
    long achieved_;
};

/// A rewrite or search loop ran past its configured budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace esma
