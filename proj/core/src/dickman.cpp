// SPDX-License-Identifier: MIT

#include "dickman/dickman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dickman/errors.hpp"
#include "dickman/parallel.hpp"
#include "dickman/quadrature.hpp"
#include "dickman/rng.hpp"

namespace dickman {
namespace {

void validate_theta(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("theta must be finite and positive");
    }
}

// Incremental evaluator for P(x) = integral_0^x s^theta(v) dv along an
// ascending sequence of abscissae, with a dyadic split absorbing the
// possible derivative singularity of s^theta at 0.
class CumulativePower {
  public:
    CumulativePower(const Utility& u, double theta) : u_(u), theta_(theta) {}

    double advance_to(double x) {
        auto f = [this](double v) { return std::pow(u_.eval(v), theta_); };
        if (last_x_ == 0.0) {
            acc_ = integrate_left_singular(f, x);
        } else {
            acc_ += gauss7(f, last_x_, x);
        }
        last_x_ = x;
        return acc_;
    }

  private:
    const Utility& u_;
    double theta_;
    double last_x_ = 0.0;
    double acc_ = 0.0;
};

}  // namespace

DickmanSpec::DickmanSpec(double theta_in, Utility utility_in)
    : theta(theta_in), utility(std::move(utility_in)) {
    validate_theta(theta);
}

SampleBatch sample_dtheta(double theta, std::uint64_t depth_n, std::size_t num_samples,
                          std::uint64_t seed, unsigned threads) {
    validate_theta(theta);
    SampleBatch batch;
    batch.values.resize(num_samples);
    batch.seed = seed;
    batch.depth_n = depth_n;
    batch.certified_d1 = recursion_d1_bound(theta, depth_n);

    const bool unit_power = theta == 1.0;
    const double inv_theta = 1.0 / theta;
    parallel_for(std::size_t{0}, num_samples, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            double w = 0.0;
            double prod = 1.0;
            for (std::uint64_t j = 0; j < depth_n; ++j) {
                const double un = rng.unit_at(j);
                prod *= unit_power ? un : std::pow(un, inv_theta);
                w += prod;
                if (prod < 1e-300) break;
            }
            batch.values[i] = w;
        }
    });
    return batch;
}

SampleBatch sample_dtheta_s(const DickmanSpec& spec, std::uint64_t depth_n,
                            std::size_t num_samples, std::uint64_t seed, unsigned threads) {
    if (spec.utility.is_identity()) {
        return sample_dtheta(spec.theta, depth_n, num_samples, seed, threads);
    }
    SampleBatch batch;
    batch.values.resize(num_samples);
    batch.seed = seed;
    batch.depth_n = depth_n;
    batch.certified_d1 = utility_recursion_d1_bound(spec, depth_n);

    const double inv_theta = 1.0 / spec.theta;
    const Utility& u = spec.utility;
    parallel_for(std::size_t{0}, num_samples, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            double w = 0.0;
            for (std::uint64_t j = depth_n; j-- > 0;) {
                const double v = std::pow(rng.unit_at(j), inv_theta);
                w = std::min(u.inverse(v * u.eval(w + 1.0)), w + 1.0);
            }
            batch.values[i] = w;
        }
    });
    return batch;
}

double bias_transform_sample(const DickmanSpec& spec, double w, double u) {
    if (!(w >= 0.0)) {
        throw RangeError("bias_transform_sample: w must be nonnegative");
    }
    if (!(u > 0.0) || !(u <= 1.0)) {
        throw RangeError("bias_transform_sample: u must lie in (0, 1]");
    }
    const double v = std::pow(u, 1.0 / spec.theta);
    if (spec.utility.is_identity()) {
        return v * (w + 1.0);
    }
    return std::min(spec.utility.inverse(v * spec.utility.eval(w + 1.0)), w + 1.0);
}

std::vector<double> default_rho_grid(double x_max, std::size_t points) {
    if (!(x_max > 1e-8) || points < 2) {
        throw std::invalid_argument("default_rho_grid: x_max must exceed 1e-8, points >= 2");
    }
    std::vector<double> grid(points);
    const double lo = std::log(1e-8);
    const double hi = std::log(x_max);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                    static_cast<double>(points - 1));
    }
    grid.back() = x_max;
    return grid;
}

RhoBound rho_bound(const DickmanSpec& spec, const std::vector<double>& grid) {
    const double theta = spec.theta;
    const double generic = theta / (theta + 1.0);
    const Utility& u = spec.utility;

    if (u.is_identity()) {
        return {generic, true, generic, "closed-form:theta/(theta+1)"};
    }

    std::vector<double> xs = grid;
    if (xs.empty()) {
        double x_max = 50.0;
        if (u.domain_limit() < x_max) x_max = u.domain_limit();
        xs = default_rho_grid(x_max);
    } else {
        std::sort(xs.begin(), xs.end());
        xs.erase(std::remove_if(xs.begin(), xs.end(),
                                [&](double x) { return !(x > 0.0) || x > u.domain_limit(); }),
                 xs.end());
        if (xs.empty()) {
            throw std::invalid_argument("rho_bound: grid has no usable points in (0, x_max]");
        }
    }

    auto kernel = [&](double x, double integral) {
        return theta * u.deriv(x) * integral / std::pow(u.eval(x), theta + 1.0);
    };

    CumulativePower cumulative(u, theta);
    double sup = 0.0;
    std::size_t arg = 0;
    std::vector<double> integrals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        integrals[i] = cumulative.advance_to(xs[i]);
        const double val = kernel(xs[i], integrals[i]);
        if (val > sup) {
            sup = val;
            arg = i;
        }
    }

    // Ternary refinement in the bracket around the grid argmax.
    {
        const double lo_x = arg > 0 ? xs[arg - 1] : xs[arg] * 0.5;
        const double hi_x = arg + 1 < xs.size() ? xs[arg + 1] : xs[arg];
        const double base_x = arg > 0 ? xs[arg - 1] : 0.0;
        const double base_int = arg > 0 ? integrals[arg - 1] : 0.0;
        auto eval_at = [&](double x) {
            auto f = [&](double v) { return std::pow(u.eval(v), theta); };
            double integral = base_int;
            if (base_x == 0.0) {
                integral = integrate_left_singular(f, x);
            } else {
                integral += gauss7(f, base_x, x);
            }
            return kernel(x, integral);
        };
        double a = lo_x;
        double b = hi_x;
        for (int it = 0; it < 60 && b - a > 1e-14 * b; ++it) {
            const double m1 = a + (b - a) / 3.0;
            const double m2 = b - (b - a) / 3.0;
            if (eval_at(m1) < eval_at(m2)) {
                a = m1;
            } else {
                b = m2;
            }
        }
        sup = std::max(sup, eval_at(0.5 * (a + b)));
    }

    const bool concave = u.kind() == UtilityKind::tabulated ? u.knots_concave() : true;
    if (!concave) {
        return {sup, false, sup, "grid-sup:uncertified"};
    }
    if (u.kind() == UtilityKind::power_mixture && theta == 1.0) {
        const double a = u.max_exponent();
        const double cap = a / (a + 1.0);
        return {std::min(sup, cap), true, sup, "support:a/(a+1)"};
    }
    return {generic, true, sup, "concave:theta/(theta+1)"};
}

double contraction_constant(const DickmanSpec& spec) {
    const Utility& u = spec.utility;
    const bool concave = u.kind() == UtilityKind::tabulated ? u.knots_concave() : true;
    if (!concave) {
        throw ContractionError("contraction_constant: utility has no concavity certificate");
    }
    if (u.kind() == UtilityKind::power_mixture && spec.theta == 1.0) {
        const double a = u.max_exponent();
        return a / (a + 1.0);
    }
    return spec.theta / (spec.theta + 1.0);
}

double recursion_d1_bound(double theta, std::uint64_t depth_n) {
    validate_theta(theta);
    return theta * std::pow(theta / (theta + 1.0), static_cast<double>(depth_n));
}

double utility_recursion_d1_bound(const DickmanSpec& spec, std::uint64_t depth_n) {
    const double rho = contraction_constant(spec);
    const double step = spec.theta / (spec.theta + 1.0);
    return std::pow(step, static_cast<double>(depth_n)) * expected_inverse_draw(spec) /
           (1.0 - rho);
}

double expected_inverse_draw(const DickmanSpec& spec) {
    const double theta = spec.theta;
    if (spec.utility.is_identity()) {
        return theta / (theta + 1.0);
    }
    const Utility& u = spec.utility;
    auto f = [&](double v) { return theta * u.inverse(v) * std::pow(v, theta - 1.0); };
    return integrate_zero_split(f, 1.0, 1e-9);
}

std::uint64_t reference_depth(double theta, double epsilon) {
    validate_theta(theta);
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("reference_depth: epsilon must be positive");
    }
    if (theta <= epsilon) return 0;
    const double step = theta / (theta + 1.0);
    double n_est = std::ceil(std::log(theta / epsilon) / std::log((theta + 1.0) / theta));
    auto n = static_cast<std::uint64_t>(std::max(0.0, n_est));
    while (theta * std::pow(step, static_cast<double>(n)) > epsilon) ++n;
    while (n > 0 && theta * std::pow(step, static_cast<double>(n - 1)) <= epsilon) --n;
    return n;
}

}  // namespace dickman
