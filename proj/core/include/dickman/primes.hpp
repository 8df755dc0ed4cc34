// SPDX-License-Identifier: MIT
//
// Exact prime enumeration and the derived quantities used by the prime-sum
// constructions: log-weights, the two families of cumulative mean sums, and
// the coupling breakpoints of the size-bias index law.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dickman {

struct PrimeTable {
    std::vector<std::uint64_t> primes;  // p_1..p_n, strictly increasing
    std::vector<double> logs;           // log p_k

    // Compensated prefix sums of log p_k/(p_k - 1) and log p_k/(1 + p_k).
    std::vector<double> cum_geometric;
    std::vector<double> cum_bernoulli;

    // Normalized geometric-law index breakpoints F_0..F_n with F_0 = 0 and
    // F_n = 1: F_j proportional to the prefix of log p_k/(p_k - 1).
    std::vector<double> breakpoints;

    double mu_geometric = 0.0;  // cum_geometric[n-1] / log p_n
    double mu_bernoulli = 0.0;

    std::uint64_t n() const { return primes.size(); }
    double log_pn() const { return logs.back(); }

    // Mean of the length-k prefix sum under each mark family, reusing the
    // cumulative fields; k in [1, n].
    double mu_geometric_at(std::uint64_t k) const;
    double mu_bernoulli_at(std::uint64_t k) const;
};

// First n primes by a segmented sieve (odd-only blocks). n above the
// configured memory budget (10^7) raises ResourceError.
std::vector<std::uint64_t> first_primes(std::uint64_t n);

PrimeTable build_prime_table(std::uint64_t n);
PrimeTable make_prime_table(std::vector<std::uint64_t> primes);

// Flat binary cache: magic "DKPT", version u32, n u64, mu_geometric f64,
// mu_bernoulli f64, then primes as u64 little-endian. Loading recomputes
// the cumulative fields and verifies them against the stored means to
// 1e-12.
void save_prime_table(const PrimeTable& table, const std::string& path);
PrimeTable load_prime_table(const std::string& path);

// Builds the table, preferring the cache: loads `cache_path` when it holds
// at least n primes (truncating to n), otherwise builds and saves.
PrimeTable cached_prime_table(std::uint64_t n, const std::string& cache_path);

}  // namespace dickman
