// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dickman {

// Compensated accumulator (Kahan-Babuska-Neumaier). Tracks the rounding
// error of every addition, including the case where the incoming term is
// larger than the running sum, so long series and cancelling pairs both sum
// with error independent of length.
struct KahanSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double value) {
        const double t = sum + value;
        if (std::fabs(sum) >= std::fabs(value)) {
            compensation += (sum - t) + value;
        } else {
            compensation += (value - t) + sum;
        }
        sum = t;
    }

    KahanSum& operator+=(double value) {
        add(value);
        return *this;
    }

    double value() const { return sum + compensation; }
};

inline double kahan_total(const std::vector<double>& values) {
    KahanSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

inline double kahan_mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return kahan_total(values) / static_cast<double>(values.size());
}

}  // namespace dickman
