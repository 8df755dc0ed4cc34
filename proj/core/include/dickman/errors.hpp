// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace dickman {

// Argument outside the mathematical domain of an operation (negative input
// to a utility, inverse target outside the range of s, and so on).
struct RangeError : std::domain_error {
    using std::domain_error::domain_error;
};

// Evaluation outside the knot span of a tabulated utility.
struct ExtrapolationError : RangeError {
    using RangeError::RangeError;
};

// Request exceeds a configured resource budget (table size, memory).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation whose validity needs a contraction constant rho < 1 was
// asked to run with rho >= 1 or with an uncertified rho.
struct ContractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dickman
