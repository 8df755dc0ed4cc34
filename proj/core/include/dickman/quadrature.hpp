// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace dickman {

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                                depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                                depth - 1);
}

}  // namespace detail

// Adaptive composite Simpson rule with Richardson correction, absolute
// tolerance abs_tol on [a, b].
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol,
                        int max_depth = 48) {
    if (!(b >= a)) throw std::invalid_argument("integration bounds reversed");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol,
                                        max_depth);
}

// Seven-point Gauss-Legendre rule on [a, b]; exact through degree 13.
template <typename F>
double gauss7(const F& f, double a, double b) {
    static constexpr double kNode[3] = {0.4058451513773971669066064,
                                        0.7415311855993944398638648,
                                        0.9491079123427585245261897};
    static constexpr double kWeight[3] = {0.3818300505051189449503698,
                                          0.2797053914892766679014678,
                                          0.1294849661688696932706114};
    static constexpr double kWeightCenter = 0.4179591836734693877551020;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double acc = kWeightCenter * f(c);
    for (int i = 0; i < 3; ++i) {
        const double d = h * kNode[i];
        acc += kWeight[i] * (f(c - d) + f(c + d));
    }
    return acc * h;
}

// Integral over [0, b] of a function that may have an integrable power
// singularity at 0. Splits geometrically toward the origin and applies a
// four-panel Gauss rule on each dyadic piece (the extra panels buy ~2^28 in
// accuracy for power singularities), stopping once pieces stop contributing.
template <typename F>
double integrate_left_singular(const F& f, double b, double rel_floor = 1e-15,
                               int max_splits = 120) {
    if (b <= 0.0) return 0.0;
    double total = 0.0;
    double hi = b;
    for (int k = 0; k < max_splits; ++k) {
        const double lo = 0.5 * hi;
        const double w = 0.25 * (hi - lo);
        double piece = 0.0;
        for (int panel = 0; panel < 4; ++panel) {
            piece += gauss7(f, lo + panel * w, lo + (panel + 1) * w);
        }
        total += piece;
        if (std::fabs(piece) <= rel_floor * std::fabs(total) &&
            k > 4) {
            break;
        }
        hi = lo;
    }
    return total;
}

// Adaptive Simpson on [0, b] with the first slice near the origin handled
// by the singularity-aware rule, for integrands whose derivatives blow up
// at 0 while the integral stays finite.
template <typename F>
double integrate_zero_split(const F& f, double b, double abs_tol) {
    if (b <= 0.0) return 0.0;
    const double cut = std::min(b, 1.0 / 1024.0);
    double head = integrate_left_singular(f, cut);
    if (cut >= b) return head;
    return head + adaptive_simpson(f, cut, b, abs_tol);
}

}  // namespace dickman
