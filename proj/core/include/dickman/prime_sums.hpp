// SPDX-License-Identifier: MIT
//
// Number-theoretic sums S_n = (1/log p_n) sum_{k<=n} X_k log p_k whose laws
// approach the standard Dickman family, for four mark families X_k, with
// their exact means, the explicit (T, U) index couplings behind the
// size-bias identity E[S phi(S)] = mu E[phi(S + T)] (+ remainder for
// geometric marks), and the identity's Monte Carlo verification.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dickman/bound_report.hpp"
#include "dickman/primes.hpp"
#include "dickman/sample_batch.hpp"

namespace dickman {

enum class PrimeMarkLaw {
    geometric,        // X_k ~ Geom(1 - 1/p_k), P(X = m) = (1/p_k)^m (1 - 1/p_k)
    bernoulli,        // X_k ~ Ber(1/(1 + p_k))
    poisson_inv,      // X_k ~ Poi(1/(1 + p_k))
    poisson_logratio  // X_k ~ Poi(1 - log p_{k-1}/log p_k), p_0 = 1
};

PrimeMarkLaw parse_mark_law(const std::string& name);
const char* mark_law_name(PrimeMarkLaw law);

// Independent realizations of S_n.
SampleBatch sample_prime_sum(const PrimeTable& table, PrimeMarkLaw law, std::size_t num_samples,
                             std::uint64_t seed, unsigned threads = 0);

// Exact mean E[S_n] (compensated summation; exactly 1 for the telescoping
// log-ratio Poisson family).
double mu_n(const PrimeTable& table, PrimeMarkLaw law);

// Mean of the prefix sum S_k built from the same table, k in [1, n].
double mu_prefix(const PrimeTable& table, PrimeMarkLaw law, std::uint64_t k);

// Normalized index breakpoints F_0..F_n of the size-bias index I for the
// given mark family (F_{j-1} <= U < F_j selects I = j).
std::vector<double> coupling_breakpoints(const PrimeTable& table, PrimeMarkLaw law);

struct CouplingSummary {
    std::vector<double> t;
    std::vector<double> u;
    double mean_abs_diff = 0.0;        // Monte Carlo estimate of E|T - U|
    double mc_stderr = 0.0;
    double exact_mean_abs_diff = 0.0;  // closed-form piecewise integral
    double max_abs_diff = 0.0;         // largest |T - U| observed
};

// Samples the coupling (T, U): U uniform, I deterministic given U through
// the family's breakpoints, T = log p_I/log p_n (minus a fresh Bernoulli
// mark's contribution for the Bernoulli family).
CouplingSummary coupling_TU(const PrimeTable& table, PrimeMarkLaw law, std::size_t num_samples,
                            std::uint64_t seed);

// Deterministic E|T - U| by integrating |T - u| in closed form over each
// breakpoint interval.
double exact_coupling_mean_abs(const PrimeTable& table, PrimeMarkLaw law);

// Almost-sure bound log 2 / log p_n on |T - U| for the log-ratio family.
double logratio_coupling_bound(const PrimeTable& table);

// Exact E|X_I log p_I / log p_n| for the Bernoulli family size-bias index.
double bernoulli_removed_mass(const PrimeTable& table);

struct RemainderEstimate {
    double estimate = 0.0;
    double mc_stderr = 0.0;
    double envelope = 0.0;  // deterministic upper bound on |remainder|
};

// Monte Carlo estimate of the geometric-mark size-bias remainder
//   R_phi = (1/log p_n) sum_k (log p_k/(p_k-1)) E[X_k (phi(S_n + c_k) - phi(S_n))],
// c_k = log p_k/log p_n, for phi with Lipschitz constant 1/2, plus the
// envelope (1/(2 log^2 p_n)) sum_k log^2 p_k/(p_k-1)^2.
RemainderEstimate remainder_term(const PrimeTable& table,
                                 const std::function<double(double)>& phi,
                                 std::size_t num_samples, std::uint64_t seed);

double remainder_envelope(const PrimeTable& table);

struct LipHalfFn {
    std::string name;
    std::function<double(double)> phi;
};

// Test functions with Lipschitz constant 1/2: x/2, sin(x)/2, cos(x)/2, and
// smoothed half-slope hinges at the given centers.
std::vector<LipHalfFn> lip_half_dictionary(const std::vector<double>& hinge_centers = {0.5, 1.0,
                                                                                       2.0});

// Verifies E[S phi(S)] = mu_n E[phi(S + T)] (+ remainder for geometric
// marks) over the Lip-1/2 dictionary as one paired Monte Carlo statistic
// per phi; reports the worst deviation in units of the 5-sigma budget.
BoundReport size_bias_check(const PrimeTable& table, PrimeMarkLaw law, std::size_t num_samples,
                            std::uint64_t seed);

}  // namespace dickman
