// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>

namespace dickman {

// Poi(lambda) by sequential inversion of one uniform u in (0, 1], given
// exp(-lambda) precomputed; expected work 1 + lambda.
inline std::uint64_t poisson_inverse(double u, double lambda, double exp_neg_lambda) {
    double p = exp_neg_lambda;
    double cdf = p;
    std::uint64_t m = 0;
    while (u > cdf) {
        ++m;
        p *= lambda / static_cast<double>(m);
        cdf += p;
        if (p == 0.0) break;
    }
    return m;
}

}  // namespace dickman
