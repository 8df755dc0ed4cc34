// SPDX-License-Identifier: MIT
//
// Utility functions s: [0, inf) -> [0, inf) used to bend the base
// perpetuity recursion. Every variant satisfies s(0) = 0 and s(1) = 1;
// the built-in families are strictly increasing and concave, which is what
// certifies their contraction constant downstream.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dickman/errors.hpp"

namespace dickman {

enum class UtilityKind {
    identity,
    exponential_cara,
    log_shift,
    power_mixture,
    tabulated,
};

struct PowerAtom {
    double exponent;  // in (0, 1]
    double weight;    // nonnegative; atom weights sum to 1
};

class Utility {
  public:
    // s(x) = x.
    static Utility identity();

    // s(x) = (1 - e^{-alpha x}) / (1 - e^{-alpha}), alpha > 0.
    static Utility exponential_cara(double alpha);

    // s(x) = log(x + 1) / log 2.
    static Utility log_shift();

    // s(x) = sum_i w_i x^{a_i} with a_i in (0, 1], w_i >= 0, sum w_i = 1.
    static Utility power_mixture(std::vector<PowerAtom> atoms);

    // Monotone cubic interpolant through strictly increasing knots.
    // Knots must start at (0, 0) and reach x = 1 with s(1) = 1 within
    // 1e-12. Evaluation beyond the last knot raises ExtrapolationError.
    static Utility tabulated(std::vector<double> xs, std::vector<double> ys);

    UtilityKind kind() const { return kind_; }

    double eval(double x) const;
    double deriv(double x) const;
    double second_deriv(double x) const;

    // Inverse of s. Closed form where one exists, otherwise bracketed
    // bisection to 1e-12 relative width with upper bracket doubling.
    // Targets outside [0, sup s) raise RangeError.
    double inverse(double y) const;

    // Supremum of the range (may be +inf).
    double sup_range() const;

    // Largest knot for tabulated utilities, +inf otherwise.
    double domain_limit() const;

    bool is_identity() const { return kind_ == UtilityKind::identity; }

    // True for the families that are concave by construction. Tabulated
    // data is concave only if its knots say so; see knots_concave().
    bool concave_builtin() const;

    // Second differences of tabulated knots are nonpositive. Meaningful
    // only for tabulated utilities.
    bool knots_concave() const;

    // Largest power-mixture exponent (the upper edge of the support).
    double max_exponent() const;

    double cara_alpha() const { return alpha_; }
    const std::vector<PowerAtom>& atoms() const { return atoms_; }

    // Short identification such as "identity", "exp(2)", "log",
    // "powermix(...)", "tabulated(17)".
    std::string tag() const;

  private:
    Utility() = default;

    UtilityKind kind_ = UtilityKind::identity;
    double alpha_ = 0.0;
    std::vector<PowerAtom> atoms_;

    // Tabulated representation: knots plus monotone (Fritsch-Carlson)
    // endpoint-adjusted slopes.
    std::vector<double> knot_x_;
    std::vector<double> knot_y_;
    std::vector<double> knot_d_;

    std::size_t knot_interval(double x) const;
};

// Grid diagnostics used by the property tests and the rho certificate:
// checks s(0) = 0 and s(1) = 1 to 1e-12, strict monotonicity, and the
// translation bound s(x + 1) <= s(x) + 1 at every grid point. Throws
// std::invalid_argument describing the first violation.
void validate_utility_shape(const Utility& u, const std::vector<double>& grid);

}  // namespace dickman
