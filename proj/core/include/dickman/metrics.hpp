// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dickman/bound_report.hpp"
#include "dickman/dickman.hpp"
#include "dickman/sample_batch.hpp"

namespace dickman {

// Empirical Wasserstein-1 distance between equal-size batches: the mean
// absolute difference of matched order statistics (the optimal coupling of
// two empirical measures on the line).
struct W1Result {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Point estimate only, no bootstrap. Throws std::invalid_argument on size
// mismatch or empty batches.
double wasserstein1_estimate(const SampleBatch& a, const SampleBatch& b);

// Estimate plus a nonparametric bootstrap standard error. Resamples are
// drawn in sorted order directly (uniform order statistics via normalized
// exponential spacings), so each of the `resamples` replicas costs O(m)
// instead of a fresh sort. Deterministic given bootstrap_seed; thread count
// never changes the result.
W1Result wasserstein1_empirical(const SampleBatch& a, const SampleBatch& b,
                                std::size_t resamples = 200,
                                std::uint64_t bootstrap_seed = 0x1b007ULL,
                                unsigned threads = 0);

// Named scalar test function for dictionary-based distance lower bounds.
struct TestFn {
  std::string name;
  std::function<double(double)> h;
};

// Dictionary of functions whose derivative is bounded by 1 and Lipschitz-1:
// the identity, scaled sines and cosines at frequencies 1 and 2 (frequency
// omega scaled by 1/omega^2 to keep the curvature bound), and quadratically
// mollified hinges (ramp half-width 1/2) at the given centers.
std::vector<TestFn> h11_dictionary(const std::vector<double>& hinge_centers);

// Largest absolute mean gap over the dictionary. This is a LOWER bound for
// the smooth-class distance: a finite dictionary can only under-shoot the
// supremum. std_error is the two-sample standard error of the gap at the
// maximizing function.
struct SmoothDistance {
  double value = 0.0;
  std::string witness;
  double std_error = 0.0;
};
SmoothDistance smooth_distance_lower(const SampleBatch& a, const SampleBatch& b,
                                     const std::vector<TestFn>& dictionary);

// Certified reference batch: samples the recursion at the least depth whose
// closed-form distance bound theta*(theta/(theta+1))^depth is <= epsilon, and
// records that bound in certified_d1.
SampleBatch reference_oracle(double theta, double epsilon, std::size_t num_samples,
                             std::uint64_t seed, unsigned threads = 0);

// Nearest-rank empirical quantiles (probs in [0, 1]).
std::vector<double> batch_quantiles(const SampleBatch& batch, const std::vector<double>& probs);

// Two-sample Kolmogorov-Smirnov statistic max |F_a - F_b| and the rejection
// threshold c(alpha) * sqrt((m+n)/(m*n)) with c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_statistic(const SampleBatch& a, const SampleBatch& b);
double ks_threshold(std::size_t m, std::size_t n, double alpha);

// Standard normal quantile (safeguarded Newton on the erfc form) and the
// Wilson-Hilferty chi-square quantile built on it.
double normal_quantile(double p);
double chi_square_quantile(double df, double p);

// Checks that `lower` is stochastically dominated by `upper`: survival
// probabilities of `lower` may exceed those of `upper` by at most
// tol_mult * 0.5 * sqrt(1/m_a + 1/m_b) on a quantile grid of `upper`.
struct DominationCheck {
  bool dominated = false;
  double max_violation = 0.0;
  double tolerance = 0.0;
};
DominationCheck survival_domination(const SampleBatch& lower, const SampleBatch& upper,
                                    std::size_t grid_points = 200, double tol_mult = 4.0);

// Parameters shared by the registered bound checks. Fields that a claim does
// not use are ignored; prime-table claims bump n to at least 1000.
struct ClaimParams {
  double theta = 1.0;
  std::size_t n = 100;
  std::size_t depth = 10;
  std::size_t num_samples = 200000;
  std::uint64_t seed = 0;
  Utility utility = Utility::identity();
  std::string marks = "geometric";
  unsigned threads = 0;
  std::string table_cache;  // optional prime-table cache path
};

struct ClaimInfo {
  std::string id;
  std::string summary;
};

// Registered claims, each mapping to one quantitative statement checked by
// check_bound. Summaries are self-describing.
const std::vector<ClaimInfo>& list_claims();

// Runs the named claim and assembles a BoundReport. Unknown claim ids throw
// std::invalid_argument. Fit-style claims (prime mark means scaling like
// C/log p_n) report the fitted constant as `theoretical`, the max relative
// spread across the fit window as `empirical`, and pass when the spread stays
// below 25%.
BoundReport check_bound(const std::string& claim_id, const ClaimParams& params);

}  // namespace dickman
