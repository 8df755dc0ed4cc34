// SPDX-License-Identifier: MIT

#include "dickman/utility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace dickman {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

void require_nonnegative_arg(double x, const char* fn) {
    if (!(x >= 0.0)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s: argument %.17g is negative", fn, x);
        throw RangeError(buf);
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

Utility Utility::identity() {
    Utility u;
    u.kind_ = UtilityKind::identity;
    return u;
}

Utility Utility::exponential_cara(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("exponential_cara: alpha must be finite and positive");
    }
    Utility u;
    u.kind_ = UtilityKind::exponential_cara;
    u.alpha_ = alpha;
    return u;
}

Utility Utility::log_shift() {
    Utility u;
    u.kind_ = UtilityKind::log_shift;
    return u;
}

Utility Utility::power_mixture(std::vector<PowerAtom> atoms) {
    if (atoms.empty()) {
        throw std::invalid_argument("power_mixture: needs at least one atom");
    }
    double total = 0.0;
    for (const PowerAtom& a : atoms) {
        if (!(a.exponent > 0.0) || !(a.exponent <= 1.0)) {
            throw std::invalid_argument("power_mixture: exponents must lie in (0, 1]");
        }
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
            throw std::invalid_argument("power_mixture: weights must be nonnegative");
        }
        total += a.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("power_mixture: weights must sum to 1");
    }
    Utility u;
    u.kind_ = UtilityKind::power_mixture;
    u.atoms_ = std::move(atoms);
    return u;
}

Utility Utility::tabulated(std::vector<double> xs, std::vector<double> ys) {
    const std::size_t n = xs.size();
    if (n != ys.size() || n < 2) {
        throw std::invalid_argument("tabulated: needs matching xs/ys with at least two knots");
    }
    if (xs[0] != 0.0 || std::fabs(ys[0]) > 1e-12) {
        throw std::invalid_argument("tabulated: knots must start at (0, 0)");
    }
    ys[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(xs[i + 1] > xs[i]) || !(ys[i + 1] > ys[i])) {
            throw std::invalid_argument("tabulated: knots must be strictly increasing in x and y");
        }
    }
    if (xs.back() < 1.0) {
        throw std::invalid_argument("tabulated: knots must cover x = 1");
    }

    // Fritsch-Carlson slopes: monotone data with positive secants stays
    // monotone under the weighted harmonic mean; endpoints use the
    // clamped three-point formula.
    std::vector<double> h(n - 1), delta(n - 1), d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs[i + 1] - xs[i];
        delta[i] = (ys[i + 1] - ys[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = delta[0];
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        auto endpoint = [](double h0, double h1, double d0, double d1) {
            double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (s <= 0.0) return 0.0;
            if (s > 3.0 * d0) return 3.0 * d0;
            return s;
        };
        d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    Utility u;
    u.kind_ = UtilityKind::tabulated;
    u.knot_x_ = std::move(xs);
    u.knot_y_ = std::move(ys);
    u.knot_d_ = std::move(d);
    const double at_one = u.eval(1.0);
    if (std::fabs(at_one - 1.0) > 1e-12) {
        throw std::invalid_argument("tabulated: interpolant must satisfy s(1) = 1 within 1e-12");
    }
    return u;
}

std::size_t Utility::knot_interval(double x) const {
    // Largest i with knot_x_[i] <= x, capped at the final cell.
    const auto it = std::upper_bound(knot_x_.begin(), knot_x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - knot_x_.begin());
    if (i > 0) --i;
    if (i + 1 >= knot_x_.size()) i = knot_x_.size() - 2;
    return i;
}

double Utility::eval(double x) const {
    require_nonnegative_arg(x, "Utility::eval");
    switch (kind_) {
        case UtilityKind::identity:
            return x;
        case UtilityKind::exponential_cara:
            return std::expm1(-alpha_ * x) / std::expm1(-alpha_);
        case UtilityKind::log_shift:
            return std::log1p(x) / kLn2;
        case UtilityKind::power_mixture: {
            double s = 0.0;
            for (const PowerAtom& a : atoms_) s += a.weight * std::pow(x, a.exponent);
            return s;
        }
        case UtilityKind::tabulated: {
            if (x > knot_x_.back()) {
                char buf[96];
                std::snprintf(buf, sizeof(buf),
                              "tabulated utility evaluated at %.17g beyond last knot %.17g", x,
                              knot_x_.back());
                throw ExtrapolationError(buf);
            }
            const std::size_t i = knot_interval(x);
            const double hcell = knot_x_[i + 1] - knot_x_[i];
            const double sec = (knot_y_[i + 1] - knot_y_[i]) / hcell;
            const double c2 = (3.0 * sec - 2.0 * knot_d_[i] - knot_d_[i + 1]) / hcell;
            const double c3 = (knot_d_[i] + knot_d_[i + 1] - 2.0 * sec) / (hcell * hcell);
            const double u = x - knot_x_[i];
            return knot_y_[i] + u * (knot_d_[i] + u * (c2 + u * c3));
        }
    }
    throw std::logic_error("Utility::eval: unknown kind");
}

double Utility::deriv(double x) const {
    require_nonnegative_arg(x, "Utility::deriv");
    switch (kind_) {
        case UtilityKind::identity:
            return 1.0;
        case UtilityKind::exponential_cara:
            return alpha_ * std::exp(-alpha_ * x) / -std::expm1(-alpha_);
        case UtilityKind::log_shift:
            return 1.0 / ((1.0 + x) * kLn2);
        case UtilityKind::power_mixture: {
            double s = 0.0;
            for (const PowerAtom& a : atoms_) {
                if (a.exponent == 1.0) {
                    s += a.weight;
                } else if (x == 0.0) {
                    if (a.weight > 0.0) return kInf;
                } else {
                    s += a.weight * a.exponent * std::pow(x, a.exponent - 1.0);
                }
            }
            return s;
        }
        case UtilityKind::tabulated: {
            if (x > knot_x_.back()) {
                throw ExtrapolationError("tabulated utility derivative beyond last knot");
            }
            const std::size_t i = knot_interval(x);
            const double hcell = knot_x_[i + 1] - knot_x_[i];
            const double sec = (knot_y_[i + 1] - knot_y_[i]) / hcell;
            const double c2 = (3.0 * sec - 2.0 * knot_d_[i] - knot_d_[i + 1]) / hcell;
            const double c3 = (knot_d_[i] + knot_d_[i + 1] - 2.0 * sec) / (hcell * hcell);
            const double u = x - knot_x_[i];
            return knot_d_[i] + u * (2.0 * c2 + 3.0 * u * c3);
        }
    }
    throw std::logic_error("Utility::deriv: unknown kind");
}

double Utility::second_deriv(double x) const {
    require_nonnegative_arg(x, "Utility::second_deriv");
    switch (kind_) {
        case UtilityKind::identity:
            return 0.0;
        case UtilityKind::exponential_cara:
            return -alpha_ * alpha_ * std::exp(-alpha_ * x) / -std::expm1(-alpha_);
        case UtilityKind::log_shift:
            return -1.0 / ((1.0 + x) * (1.0 + x) * kLn2);
        case UtilityKind::power_mixture: {
            double s = 0.0;
            for (const PowerAtom& a : atoms_) {
                if (a.exponent == 1.0) continue;
                if (x == 0.0) {
                    if (a.weight > 0.0) return -kInf;
                } else {
                    s += a.weight * a.exponent * (a.exponent - 1.0) * std::pow(x, a.exponent - 2.0);
                }
            }
            return s;
        }
        case UtilityKind::tabulated: {
            if (x > knot_x_.back()) {
                throw ExtrapolationError("tabulated utility curvature beyond last knot");
            }
            const std::size_t i = knot_interval(x);
            const double hcell = knot_x_[i + 1] - knot_x_[i];
            const double sec = (knot_y_[i + 1] - knot_y_[i]) / hcell;
            const double c2 = (3.0 * sec - 2.0 * knot_d_[i] - knot_d_[i + 1]) / hcell;
            const double c3 = (knot_d_[i] + knot_d_[i + 1] - 2.0 * sec) / (hcell * hcell);
            const double u = x - knot_x_[i];
            return 2.0 * c2 + 6.0 * u * c3;
        }
    }
    throw std::logic_error("Utility::second_deriv: unknown kind");
}

double Utility::inverse(double y) const {
    if (!(y >= 0.0)) {
        throw RangeError("Utility::inverse: target must be nonnegative");
    }
    switch (kind_) {
        case UtilityKind::identity:
            return y;
        case UtilityKind::exponential_cara: {
            const double sup = sup_range();
            if (y >= sup) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "Utility::inverse: target %.17g at or above range supremum %.17g", y,
                              sup);
                throw RangeError(buf);
            }
            return -std::log1p(y * std::expm1(-alpha_)) / alpha_;
        }
        case UtilityKind::log_shift:
            return std::expm1(y * kLn2);
        case UtilityKind::power_mixture: {
            if (y == 0.0) return 0.0;
            double lo = 0.0;
            double hi = 1.0;
            while (eval(hi) < y) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e300) {
                    throw RangeError("Utility::inverse: target not reached by power mixture");
                }
            }
            for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (eval(mid) < y ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        case UtilityKind::tabulated: {
            if (y > knot_y_.back()) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "Utility::inverse: target %.17g above tabulated maximum %.17g", y,
                              knot_y_.back());
                throw RangeError(buf);
            }
            if (y == 0.0) return 0.0;
            const auto it = std::lower_bound(knot_y_.begin(), knot_y_.end(), y);
            std::size_t i = static_cast<std::size_t>(it - knot_y_.begin());
            if (i > 0) --i;
            if (i + 1 >= knot_x_.size()) i = knot_x_.size() - 2;
            double lo = knot_x_[i];
            double hi = knot_x_[i + 1];
            for (int k = 0; k < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++k) {
                const double mid = 0.5 * (lo + hi);
                (eval(mid) < y ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw std::logic_error("Utility::inverse: unknown kind");
}

double Utility::sup_range() const {
    switch (kind_) {
        case UtilityKind::identity:
        case UtilityKind::log_shift:
        case UtilityKind::power_mixture:
            return kInf;
        case UtilityKind::exponential_cara:
            return 1.0 / -std::expm1(-alpha_);
        case UtilityKind::tabulated:
            return knot_y_.back();
    }
    throw std::logic_error("Utility::sup_range: unknown kind");
}

double Utility::domain_limit() const {
    return kind_ == UtilityKind::tabulated ? knot_x_.back() : kInf;
}

bool Utility::concave_builtin() const {
    return kind_ != UtilityKind::tabulated;
}

bool Utility::knots_concave() const {
    if (kind_ != UtilityKind::tabulated) return concave_builtin();
    for (std::size_t i = 0; i + 2 < knot_x_.size(); ++i) {
        const double d0 = (knot_y_[i + 1] - knot_y_[i]) / (knot_x_[i + 1] - knot_x_[i]);
        const double d1 = (knot_y_[i + 2] - knot_y_[i + 1]) / (knot_x_[i + 2] - knot_x_[i + 1]);
        if (d1 > d0 + 1e-12) return false;
    }
    return true;
}

double Utility::max_exponent() const {
    if (kind_ != UtilityKind::power_mixture) return 1.0;
    double m = 0.0;
    for (const PowerAtom& a : atoms_) {
        if (a.weight > 0.0) m = std::max(m, a.exponent);
    }
    return m;
}

std::string Utility::tag() const {
    switch (kind_) {
        case UtilityKind::identity:
            return "identity";
        case UtilityKind::exponential_cara:
            return "exp(" + format_double(alpha_) + ")";
        case UtilityKind::log_shift:
            return "log";
        case UtilityKind::power_mixture: {
            std::string s = "powermix(";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) s += ",";
                s += format_double(atoms_[i].exponent) + ":" + format_double(atoms_[i].weight);
            }
            return s + ")";
        }
        case UtilityKind::tabulated:
            return "tabulated(" + std::to_string(knot_x_.size()) + ")";
    }
    return "unknown";
}

void validate_utility_shape(const Utility& u, const std::vector<double>& grid) {
    if (std::fabs(u.eval(0.0)) > 1e-12) {
        throw std::invalid_argument("utility shape: s(0) must be 0");
    }
    if (std::fabs(u.eval(1.0) - 1.0) > 1e-12) {
        throw std::invalid_argument("utility shape: s(1) must be 1");
    }
    std::vector<double> xs = grid;
    std::sort(xs.begin(), xs.end());
    const double limit = u.domain_limit();
    double prev_x = -1.0;
    double prev_s = -1.0;
    for (double x : xs) {
        if (!(x >= 0.0) || x > limit) continue;
        const double s = u.eval(x);
        if (x > prev_x && !(s > prev_s)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "utility shape: not strictly increasing between %.17g and %.17g", prev_x,
                          x);
            throw std::invalid_argument(buf);
        }
        if (x + 1.0 <= limit) {
            const double shifted = u.eval(x + 1.0);
            if (shifted > s + 1.0 + 1e-12) {
                char buf[128];
                std::snprintf(buf, sizeof(buf),
                              "utility shape: s(x+1) > s(x)+1 at x = %.17g (gap %.3g)", x,
                              shifted - s - 1.0);
                throw std::invalid_argument(buf);
            }
        }
        prev_x = x;
        prev_s = s;
    }
}

}  // namespace dickman
