// SPDX-License-Identifier: MIT
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "dickman/errors.hpp"
#include "dickman/primes.hpp"
#include "doctest.h"

using namespace dickman;

namespace {

bool trial_division_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/dickman-test-") + name;
}

}  // namespace

TEST_SUITE("primes") {

TEST_CASE("the sieve starts exactly as the primes do") {
    const std::vector<std::uint64_t> p5 = first_primes(5);
    REQUIRE(p5.size() == 5);
    CHECK(p5[0] == 2);
    CHECK(p5[1] == 3);
    CHECK(p5[2] == 5);
    CHECK(p5[3] == 7);
    CHECK(p5[4] == 11);
    CHECK(first_primes(1) == std::vector<std::uint64_t>{2});
}

TEST_CASE("every sieved value passes trial division") {
    const std::vector<std::uint64_t> ps = first_primes(1000);
    REQUIRE(ps.size() == 1000);
    std::uint64_t prev = 1;
    for (std::uint64_t p : ps) {
        CHECK(p > prev);
        CHECK(trial_division_prime(p));
        prev = p;
    }
    // No prime was skipped: everything between consecutive entries is composite.
    for (std::size_t i = 0; i + 1 < 50; ++i) {
        for (std::uint64_t q = ps[i] + 1; q < ps[i + 1]; ++q) {
            CHECK_FALSE(trial_division_prime(q));
        }
    }
}

TEST_CASE("landmark prime values are reproduced") {
    CHECK(first_primes(10000).back() == 104729);
    CHECK(first_primes(100000).back() == 1299709);
}

TEST_CASE("table means start from their exact one-prime values") {
    const PrimeTable t = build_prime_table(1);
    // With a single prime the normalized sum is the raw mark, so the
    // geometric mean is 1/(p - 1) = 1 and the success mean 1/(1 + p) = 1/3.
    CHECK(t.mu_geometric == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.mu_bernoulli == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(t.n() == 1);
    CHECK(t.log_pn() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("prefix means agree with independently built prefixes") {
    const PrimeTable big = build_prime_table(500);
    for (std::uint64_t k : {1ull, 2ull, 10ull, 137ull, 500ull}) {
        const PrimeTable sub = build_prime_table(k);
        CHECK(big.mu_geometric_at(k) == doctest::Approx(sub.mu_geometric).epsilon(1e-13));
        CHECK(big.mu_bernoulli_at(k) == doctest::Approx(sub.mu_bernoulli).epsilon(1e-13));
    }
}

TEST_CASE("tables survive a save/load round trip") {
    const std::string path = temp_path("table-roundtrip.dkpt");
    const PrimeTable t = build_prime_table(777);
    save_prime_table(t, path);
    const PrimeTable back = load_prime_table(path);
    REQUIRE(back.n() == t.n());
    CHECK(back.primes == t.primes);
    CHECK(back.mu_geometric == doctest::Approx(t.mu_geometric).epsilon(1e-15));
    CHECK(back.mu_bernoulli == doctest::Approx(t.mu_bernoulli).epsilon(1e-15));
    for (std::size_t i = 0; i < t.logs.size(); ++i) {
        CHECK(back.logs[i] == t.logs[i]);
    }
    std::remove(path.c_str());
}

TEST_CASE("the cache builds once and reuses the stored table") {
    const std::string path = temp_path("table-cache.dkpt");
    std::remove(path.c_str());
    const PrimeTable first = cached_prime_table(300, path);
    const PrimeTable second = cached_prime_table(300, path);
    CHECK(first.primes == second.primes);
    // A differently sized request must not reuse the stale file silently.
    const PrimeTable bigger = cached_prime_table(400, path);
    CHECK(bigger.n() == 400);
    std::remove(path.c_str());
}

TEST_CASE("corrupted table files are rejected") {
    const std::string path = temp_path("table-corrupt.dkpt");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    const char junk[] = "not a table";
    std::fwrite(junk, 1, sizeof junk, f);
    std::fclose(f);
    CHECK_THROWS_AS((void)load_prime_table(path), ResourceError);
    CHECK_THROWS_AS((void)load_prime_table(temp_path("missing.dkpt")), ResourceError);
    std::remove(path.c_str());
}

}  // TEST_SUITE
