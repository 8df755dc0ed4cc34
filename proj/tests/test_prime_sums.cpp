// SPDX-License-Identifier: MIT
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dickman/kahan.hpp"
#include "dickman/prime_sums.hpp"
#include "dickman/primes.hpp"
#include "doctest.h"

using namespace dickman;

TEST_SUITE("prime_sums") {

TEST_CASE("mark-law names round trip") {
    for (PrimeMarkLaw law : {PrimeMarkLaw::geometric, PrimeMarkLaw::bernoulli,
                             PrimeMarkLaw::poisson_inv, PrimeMarkLaw::poisson_logratio}) {
        CHECK(parse_mark_law(mark_law_name(law)) == law);
    }
    CHECK_THROWS_AS((void)parse_mark_law("martian"), std::invalid_argument);
}

TEST_CASE("exact means at one prime") {
    const PrimeTable t = build_prime_table(1);
    CHECK(mu_n(t, PrimeMarkLaw::geometric) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu_n(t, PrimeMarkLaw::bernoulli) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mu_n(t, PrimeMarkLaw::poisson_inv) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mu_n(t, PrimeMarkLaw::poisson_logratio) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("telescoping intensities pin the mean at one for every n") {
    for (std::uint64_t n : {1ull, 7ull, 100ull, 3000ull}) {
        const PrimeTable t = build_prime_table(n);
        CHECK(mu_n(t, PrimeMarkLaw::poisson_logratio) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("prefix means agree with tables truncated to the prefix") {
    const PrimeTable t = build_prime_table(400);
    const PrimeTable sub = build_prime_table(40);
    for (PrimeMarkLaw law : {PrimeMarkLaw::geometric, PrimeMarkLaw::bernoulli,
                             PrimeMarkLaw::poisson_inv, PrimeMarkLaw::poisson_logratio}) {
        CHECK(mu_prefix(t, law, 40) == doctest::Approx(mu_n(sub, law)).epsilon(1e-12));
    }
}

TEST_CASE("sampled sums match their exact means") {
    const PrimeTable t = build_prime_table(200);
    const std::size_t m = 100000;
    for (PrimeMarkLaw law : {PrimeMarkLaw::geometric, PrimeMarkLaw::bernoulli,
                             PrimeMarkLaw::poisson_inv, PrimeMarkLaw::poisson_logratio}) {
        const SampleBatch b = sample_prime_sum(t, law, m, 17);
        REQUIRE(b.values.size() == m);
        KahanSum s;
        for (double v : b.values) {
            CHECK(v >= 0.0);
            s.add(v);
        }
        const double mean = s.value() / static_cast<double>(m);
        // Crude variance ceiling: each summand is nonnegative with mean near
        // one, so a 6-sigma window at sd <= 1.6 is ample for every family.
        CHECK(std::fabs(mean - mu_n(t, law)) <= 6.0 * 1.6 / std::sqrt(static_cast<double>(m)));
    }
}

TEST_CASE("index breakpoints are a normalized distribution") {
    const PrimeTable t = build_prime_table(50);
    for (PrimeMarkLaw law : {PrimeMarkLaw::geometric, PrimeMarkLaw::bernoulli,
                             PrimeMarkLaw::poisson_inv, PrimeMarkLaw::poisson_logratio}) {
        const std::vector<double> f = coupling_breakpoints(t, law);
        REQUIRE(f.size() == 51);
        CHECK(f.front() == 0.0);
        CHECK(f.back() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] >= f[i - 1]);
    }
}

TEST_CASE("single-prime couplings have closed forms") {
    const PrimeTable t = build_prime_table(1);
    // The index is forced to 1 and T = 1, so E|T - U| = E|1 - U| = 1/2.
    CHECK(exact_coupling_mean_abs(t, PrimeMarkLaw::geometric) ==
          doctest::Approx(0.5).epsilon(1e-12));
    const CouplingSummary c = coupling_TU(t, PrimeMarkLaw::geometric, 50000, 3);
    CHECK(c.exact_mean_abs_diff == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(c.mean_abs_diff - 0.5) <= 5.0 * c.mc_stderr + 1e-12);
    CHECK(c.max_abs_diff <= 1.0);
}

TEST_CASE("monte carlo couplings track the exact integral") {
    const PrimeTable t = build_prime_table(300);
    for (PrimeMarkLaw law : {PrimeMarkLaw::geometric, PrimeMarkLaw::bernoulli,
                             PrimeMarkLaw::poisson_logratio}) {
        const CouplingSummary c = coupling_TU(t, law, 60000, 5);
        const double exact = exact_coupling_mean_abs(t, law);
        CHECK(c.exact_mean_abs_diff == doctest::Approx(exact).epsilon(1e-12));
        CHECK(std::fabs(c.mean_abs_diff - exact) <= 5.0 * c.mc_stderr + 1e-12);
    }
}

TEST_CASE("log-ratio couplings obey the almost-sure ceiling") {
    for (std::uint64_t n : {10ull, 1000ull}) {
        const PrimeTable t = build_prime_table(n);
        const double cap = logratio_coupling_bound(t);
        CHECK(cap == doctest::Approx(std::log(2.0) / t.log_pn()).epsilon(1e-14));
        const CouplingSummary c = coupling_TU(t, PrimeMarkLaw::poisson_logratio, 40000, 9);
        CHECK(c.max_abs_diff <= cap + 1e-12);
        CHECK(exact_coupling_mean_abs(t, PrimeMarkLaw::poisson_logratio) <= cap);
    }
}

TEST_CASE("geometric remainder envelope starts at one half") {
    const PrimeTable t1 = build_prime_table(1);
    // (1/(2 log^2 p_1)) * log^2 p_1 / (p_1 - 1)^2 = 1/2 at p_1 = 2.
    CHECK(remainder_envelope(t1) == doctest::Approx(0.5).epsilon(1e-14));
    // The envelope collapses as n grows.
    CHECK(remainder_envelope(build_prime_table(1000)) < 0.01);
}

TEST_CASE("sampled remainders respect the envelope") {
    const PrimeTable t = build_prime_table(100);
    const auto half_x = [](double x) { return 0.5 * x; };
    const RemainderEstimate r = remainder_term(t, half_x, 60000, 13);
    CHECK(r.envelope == doctest::Approx(remainder_envelope(t)).epsilon(1e-13));
    CHECK(std::fabs(r.estimate) <= r.envelope + 5.0 * r.mc_stderr);
}

TEST_CASE("lipschitz dictionary evaluates with slope at most one half") {
    const std::vector<LipHalfFn> dict = lip_half_dictionary();
    CHECK(dict.size() >= 4);
    for (const LipHalfFn& fn : dict) {
        for (double x = 0.0; x < 4.0; x += 0.37) {
            const double slope = (fn.phi(x + 1e-6) - fn.phi(x)) / 1e-6;
            CHECK(std::fabs(slope) <= 0.5 + 1e-5);
        }
    }
}

TEST_CASE("size-bias identity holds exactly for one success prime") {
    // With n = 1 and success marks, S in {0, 1}, mu = 1/3, and the coupled
    // shift S + T is identically 1, making both sides equal for every phi.
    const PrimeTable t = build_prime_table(1);
    const BoundReport r = size_bias_check(t, PrimeMarkLaw::bernoulli, 40000, 2);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.empirical <= r.theoretical + 5.0 * r.mc_stderr + r.slack);
}

TEST_CASE("size-bias identity holds for every family at moderate n") {
    const PrimeTable t = build_prime_table(500);
    for (PrimeMarkLaw law : {PrimeMarkLaw::geometric, PrimeMarkLaw::bernoulli,
                             PrimeMarkLaw::poisson_inv, PrimeMarkLaw::poisson_logratio}) {
        const BoundReport r = size_bias_check(t, law, 60000, 4);
        CHECK(r.verdict != Verdict::fail);
    }
}

}  // TEST_SUITE
