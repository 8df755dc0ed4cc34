// SPDX-License-Identifier: MIT

#include "dickman/primes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dickman/errors.hpp"
#include "dickman/kahan.hpp"

namespace dickman {
namespace {

constexpr std::uint64_t kMaxPrimes = 10'000'000;
constexpr char kMagic[4] = {'D', 'K', 'P', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
    std::vector<std::uint8_t> composite(limit + 1, 0);
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (composite[p]) continue;
        primes.push_back(p);
        for (std::uint64_t v = p * p; v <= limit; v += p) composite[v] = 1;
    }
    return primes;
}

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace

double PrimeTable::mu_geometric_at(std::uint64_t k) const {
    if (k == 0 || k > n()) {
        throw std::invalid_argument("mu_geometric_at: k must lie in [1, n]");
    }
    return cum_geometric[k - 1] / logs[k - 1];
}

double PrimeTable::mu_bernoulli_at(std::uint64_t k) const {
    if (k == 0 || k > n()) {
        throw std::invalid_argument("mu_bernoulli_at: k must lie in [1, n]");
    }
    return cum_bernoulli[k - 1] / logs[k - 1];
}

std::vector<std::uint64_t> first_primes(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("first_primes: n must be at least 1");
    if (n > kMaxPrimes) {
        throw ResourceError("first_primes: n exceeds the 10^7 prime memory budget");
    }

    std::vector<std::uint64_t> primes;
    primes.reserve(n);
    const double nd = static_cast<double>(n);
    std::uint64_t bound =
        n < 6 ? 13
              : static_cast<std::uint64_t>(nd * (std::log(nd) + std::log(std::log(nd)))) + 16;

    for (;;) {
        primes.clear();
        primes.push_back(2);
        const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(bound))) + 1;
        const std::vector<std::uint64_t> base = simple_sieve(root);

        constexpr std::uint64_t kSpan = 1u << 21;
        std::vector<std::uint8_t> composite(kSpan / 2);
        for (std::uint64_t lo = 3; lo <= bound && primes.size() < n; lo += kSpan) {
            const std::uint64_t hi = std::min(bound + 1, lo + kSpan);
            const std::size_t len = static_cast<std::size_t>((hi - lo + 1) / 2);
            std::fill(composite.begin(), composite.begin() + len, 0);
            for (std::uint64_t p : base) {
                if (p == 2) continue;
                if (p * p >= hi) break;
                std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
                if ((start & 1) == 0) start += p;
                for (std::uint64_t v = start; v < hi; v += 2 * p) {
                    composite[static_cast<std::size_t>((v - lo) / 2)] = 1;
                }
            }
            for (std::size_t i = 0; i < len && primes.size() < n; ++i) {
                if (!composite[i]) primes.push_back(lo + 2 * i);
            }
        }
        if (primes.size() >= n) {
            primes.resize(n);
            return primes;
        }
        bound = bound + bound / 4 + 64;
    }
}

PrimeTable make_prime_table(std::vector<std::uint64_t> primes) {
    if (primes.empty()) throw std::invalid_argument("make_prime_table: empty prime list");
    PrimeTable table;
    table.primes = std::move(primes);
    const std::size_t n = table.primes.size();
    table.logs.resize(n);
    table.cum_geometric.resize(n);
    table.cum_bernoulli.resize(n);
    KahanSum geo;
    KahanSum bern;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = static_cast<double>(table.primes[k]);
        const double lp = std::log(p);
        table.logs[k] = lp;
        geo.add(lp / (p - 1.0));
        bern.add(lp / (1.0 + p));
        table.cum_geometric[k] = geo.value();
        table.cum_bernoulli[k] = bern.value();
    }
    table.mu_geometric = table.cum_geometric.back() / table.logs.back();
    table.mu_bernoulli = table.cum_bernoulli.back() / table.logs.back();
    table.breakpoints.resize(n + 1);
    table.breakpoints[0] = 0.0;
    const double total = table.cum_geometric.back();
    for (std::size_t k = 0; k < n; ++k) {
        table.breakpoints[k + 1] = table.cum_geometric[k] / total;
    }
    table.breakpoints[n] = 1.0;
    return table;
}

PrimeTable build_prime_table(std::uint64_t n) { return make_prime_table(first_primes(n)); }

void save_prime_table(const PrimeTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("save_prime_table: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, kCacheVersion);
    const std::uint64_t n = table.n();
    write_raw(out, n);
    write_raw(out, table.mu_geometric);
    write_raw(out, table.mu_bernoulli);
    out.write(reinterpret_cast<const char*>(table.primes.data()),
              static_cast<std::streamsize>(n * sizeof(std::uint64_t)));
    if (!out) throw ResourceError("save_prime_table: write failed for " + path);
}

PrimeTable load_prime_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("load_prime_table: cannot open " + path);
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 4, kMagic)) {
        throw ResourceError("load_prime_table: bad magic in " + path);
    }
    std::uint32_t version = 0;
    read_raw(in, version);
    if (version != kCacheVersion) {
        throw ResourceError("load_prime_table: unsupported cache version in " + path);
    }
    std::uint64_t n = 0;
    read_raw(in, n);
    if (n == 0 || n > kMaxPrimes) {
        throw ResourceError("load_prime_table: implausible prime count in " + path);
    }
    double stored_geo = 0.0;
    double stored_bern = 0.0;
    read_raw(in, stored_geo);
    read_raw(in, stored_bern);
    std::vector<std::uint64_t> primes(n);
    in.read(reinterpret_cast<char*>(primes.data()),
            static_cast<std::streamsize>(n * sizeof(std::uint64_t)));
    if (!in) throw ResourceError("load_prime_table: truncated cache " + path);

    PrimeTable table = make_prime_table(std::move(primes));
    if (std::fabs(table.mu_geometric - stored_geo) > 1e-12 ||
        std::fabs(table.mu_bernoulli - stored_bern) > 1e-12) {
        throw ResourceError("load_prime_table: stored means disagree with recomputation");
    }
    return table;
}

PrimeTable cached_prime_table(std::uint64_t n, const std::string& cache_path) {
    if (cache_path.empty()) return build_prime_table(n);
    if (std::ifstream(cache_path).good()) {
        try {
            PrimeTable cached = load_prime_table(cache_path);
            if (cached.n() == n) return cached;
            if (cached.n() > n) {
                cached.primes.resize(n);
                return make_prime_table(std::move(cached.primes));
            }
        } catch (const ResourceError&) {
            // Unreadable or stale cache: rebuild below and overwrite.
        }
    }
    PrimeTable table = build_prime_table(n);
    save_prime_table(table, cache_path);
    return table;
}

}  // namespace dickman
