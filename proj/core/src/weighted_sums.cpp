// SPDX-License-Identifier: MIT

#include "dickman/weighted_sums.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dickman/inversion.hpp"
#include "dickman/kahan.hpp"
#include "dickman/parallel.hpp"
#include "dickman/rng.hpp"

namespace dickman {
namespace {

constexpr double kTwoPi = 6.283185307179586;

double standard_normal(CounterRng& rng) {
    const double u1 = rng.next_unit();
    const double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Marsaglia-Tsang for shape >= 1; shapes below 1 are boosted through
// G(a) = G(a+1) * U^(1/a).
double gamma_mean_one(CounterRng& rng, double shape) {
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(rng.next_unit(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return boost * d * v / shape;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return boost * d * v / shape;
        }
    }
}

double draw_weight(CounterRng& rng, const WeightLaw& law, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    if (law.is_deterministic()) return kd;
    const double shape = std::pow(kd, law.eps) / law.v;
    return kd * gamma_mean_one(rng, shape);
}

}  // namespace

WeightLaw WeightLaw::deterministic() { return WeightLaw{}; }

WeightLaw WeightLaw::scaled_gamma(double v, double eps) {
    if (!(v > 0.0)) {
        throw std::invalid_argument("scaled_gamma: variance scale v must be positive");
    }
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("scaled_gamma: eps must be nonnegative");
    }
    WeightLaw law;
    law.deterministic_ = false;
    law.v = v;
    law.eps = eps;
    return law;
}

double WeightLaw::variance_at(std::uint64_t k) const {
    if (deterministic_) return 0.0;
    const double kd = static_cast<double>(k);
    return v * std::pow(kd, 2.0 - eps);
}

SumSpec::SumSpec(std::uint64_t n_in, SumMarks marks_in, double theta_in, WeightLaw weights_in)
    : n(n_in), marks(marks_in), theta(theta_in), weights(weights_in) {
    if (n == 0) throw std::invalid_argument("SumSpec: n must be at least 1");
    if (marks == SumMarks::poisson && !(theta > 0.0)) {
        throw std::invalid_argument("SumSpec: Poisson marks need theta > 0");
    }
}

SampleBatch sample_weighted_sum(const SumSpec& spec, std::size_t num_samples, std::uint64_t seed,
                                unsigned threads) {
    SampleBatch batch;
    batch.values.resize(num_samples);
    batch.seed = seed;
    batch.depth_n = spec.n;

    const double n_d = static_cast<double>(spec.n);
    if (spec.marks == SumMarks::bernoulli) {
        parallel_for(std::size_t{0}, num_samples, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                CounterRng rng(seed, i);
                double sum = draw_weight(rng, spec.weights, 1);
                std::uint64_t k = 1;
                while (k < spec.n) {
                    const double next = std::floor(static_cast<double>(k) / rng.next_unit());
                    if (next >= n_d) break;
                    k = static_cast<std::uint64_t>(next) + 1;
                    sum += draw_weight(rng, spec.weights, k);
                }
                batch.values[i] = sum / n_d;
            }
        });
        return batch;
    }

    std::vector<double> exp_neg(spec.n + 1);
    for (std::uint64_t k = 1; k <= spec.n; ++k) {
        exp_neg[k] = std::exp(-spec.theta / static_cast<double>(k));
    }
    parallel_for(std::size_t{0}, num_samples, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            double sum = 0.0;
            for (std::uint64_t k = 1; k <= spec.n; ++k) {
                const double u = rng.next_unit();
                const std::uint64_t m =
                    poisson_inverse(u, spec.theta / static_cast<double>(k), exp_neg[k]);
                if (m > 0) {
                    sum += static_cast<double>(m) * draw_weight(rng, spec.weights, k);
                }
            }
            batch.values[i] = sum / n_d;
        }
    });
    return batch;
}

SampleBatch sample_record_sum(std::uint64_t n, std::size_t num_samples, std::uint64_t seed,
                              unsigned threads) {
    if (n == 0) throw std::invalid_argument("sample_record_sum: n must be at least 1");
    SampleBatch batch;
    batch.values.resize(num_samples);
    batch.seed = seed;
    batch.depth_n = n;

    const double n_d = static_cast<double>(n);
    parallel_for(std::size_t{0}, num_samples, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng rng(seed, i);
            double running_min = 2.0;
            double record_time_sum = 0.0;
            for (std::uint64_t j = 1; j <= n; ++j) {
                const double height = rng.next_unit();
                if (height < running_min) {
                    running_min = height;
                    record_time_sum += static_cast<double>(j);
                }
            }
            batch.values[i] = record_time_sum / n_d;
        }
    });
    return batch;
}

double theoretical_bound(const SumSpec& spec) {
    const double n_d = static_cast<double>(spec.n);
    const double lead =
        spec.marks == SumMarks::bernoulli ? 3.0 / (4.0 * n_d) : spec.theta / (4.0 * n_d);
    if (spec.weights.is_deterministic()) {
        return lead;
    }
    KahanSum tail;
    KahanSum linear;
    for (std::uint64_t k = 1; k <= spec.n; ++k) {
        const double kd = static_cast<double>(k);
        const double var = spec.weights.variance_at(k);
        tail.add(std::sqrt((var + kd * kd) * var) / kd);
        if (spec.marks == SumMarks::poisson) {
            linear.add(std::sqrt(var) / kd);
        }
    }
    if (spec.marks == SumMarks::poisson) {
        return lead + spec.theta * linear.value() / n_d +
               spec.theta * tail.value() / (2.0 * n_d * n_d);
    }
    return lead + tail.value() / (2.0 * n_d * n_d);
}

}  // namespace dickman
