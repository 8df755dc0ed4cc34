// SPDX-License-Identifier: MIT
//
// Weighted random sums W_n = (1/n) sum_{k=1}^n Y_k M_k whose laws approach
// the generalized Dickman family: Bernoulli marks M_k ~ Ber(1/k) and
// Poisson marks M_k ~ Poi(theta/k), with deterministic (Y_k = k) or
// randomly scaled weights, plus the exact distance bounds they satisfy and
// the lower-record-time construction that reproduces the Bernoulli case.

#pragma once

#include <cstdint>

#include "dickman/sample_batch.hpp"

namespace dickman {

enum class SumMarks { bernoulli, poisson };

// Weight law with E[Y_k] = k. Deterministic uses Y_k = k exactly; the
// scaled variant multiplies k by a mean-1 gamma factor with variance
// v / k^eps, giving Var(Y_k) = sigma_k^2 = v * k^(2-eps).
struct WeightLaw {
    static WeightLaw deterministic();
    static WeightLaw scaled_gamma(double v, double eps);

    bool is_deterministic() const { return deterministic_; }
    double variance_at(std::uint64_t k) const;  // sigma_k^2

    double v = 0.0;
    double eps = 0.0;

  private:
    bool deterministic_ = true;
};

struct SumSpec {
    std::uint64_t n;
    SumMarks marks;
    double theta;  // Poisson marks intensity scale; ignored for Bernoulli
    WeightLaw weights;

    SumSpec(std::uint64_t n_in, SumMarks marks_in, double theta_in = 1.0,
            WeightLaw weights_in = WeightLaw::deterministic());
};

// Independent realizations of W_n. Bernoulli marks are generated by
// index-skipping over the successes (expected O(log n) draws per sample);
// Poisson marks by per-k inversion against a precomputed exp table.
SampleBatch sample_weighted_sum(const SumSpec& spec, std::size_t num_samples, std::uint64_t seed,
                                unsigned threads = 0);

// Scaled sum of the lower-record times among n i.i.d. uniform heights,
// simulated directly from the heights. Distributionally identical to
// sample_weighted_sum with Bernoulli marks and deterministic weights.
SampleBatch sample_record_sum(std::uint64_t n, std::size_t num_samples, std::uint64_t seed,
                              unsigned threads = 0);

// Exact smooth-class distance bound for the sum:
//   Bernoulli: 3/(4n) + (1/(2n^2)) sum_k (1/k) sqrt((sigma_k^2+k^2) sigma_k^2)
//   Poisson:   theta/(4n) + (theta/n) sum_k sigma_k/k + the same tail term
//              scaled by theta.
// Deterministic weights short-circuit to 3/(4n) and theta/(4n).
double theoretical_bound(const SumSpec& spec);

}  // namespace dickman
