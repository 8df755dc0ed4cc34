// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dickman/dickman.hpp"
#include "dickman/kahan.hpp"
#include "dickman/metrics.hpp"
#include "doctest.h"

using namespace dickman;

namespace {

SampleBatch make_batch(std::vector<double> values) {
    SampleBatch b;
    b.values = std::move(values);
    return b;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("order-statistics transport distance on tiny inputs") {
    const SampleBatch a = make_batch({1.0, 0.0});
    const SampleBatch b = make_batch({2.0, 0.5});
    // Sorted pairing: |0 - 0.5| + |1 - 2| over two points.
    CHECK(wasserstein1_estimate(a, b) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(wasserstein1_estimate(a, a) == 0.0);
    CHECK(wasserstein1_estimate(b, a) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS((void)wasserstein1_estimate(a, make_batch({1.0, 2.0, 3.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)wasserstein1_estimate(a, make_batch({})), std::invalid_argument);
}

TEST_CASE("transport distance is a metric with scale equivariance") {
    const SampleBatch a = sample_dtheta(1.0, 8, 5000, 41);
    const SampleBatch b = sample_dtheta(1.0, 8, 5000, 42);
    const SampleBatch c = sample_dtheta(1.0, 8, 5000, 43);
    const double ab = wasserstein1_estimate(a, b);
    const double bc = wasserstein1_estimate(b, c);
    const double ac = wasserstein1_estimate(a, c);
    CHECK(ac <= ab + bc + 1e-12);

    SampleBatch a2 = a;
    SampleBatch b2 = b;
    for (double& v : a2.values) v *= 2.0;
    for (double& v : b2.values) v *= 2.0;
    CHECK(wasserstein1_estimate(a2, b2) == doctest::Approx(2.0 * ab).epsilon(1e-13));
}

TEST_CASE("coupled depth pairs expose the exact tail mass") {
    // Same-seed batches are monotone coupled, so the sorted pairing reduces
    // to the mean gap: E W_41 - E W_10 = 2^-10 - 2^-41 for theta = 1.
    const std::size_t m = 200000;
    const SampleBatch shallow = sample_dtheta(1.0, 10, m, 4);
    const SampleBatch deep = sample_dtheta(1.0, 41, m, 4);
    const double w1 = wasserstein1_estimate(shallow, deep);
    KahanSum gap;
    for (std::size_t i = 0; i < m; ++i) gap.add(deep.values[i] - shallow.values[i]);
    CHECK(w1 == doctest::Approx(gap.value() / static_cast<double>(m)).epsilon(1e-12));
    CHECK(std::fabs(w1 - (0x1.0p-10 - 0x1.0p-41)) <= 1.2e-4);
}

TEST_CASE("bootstrap resampling is deterministic and honest about noise") {
    const SampleBatch a = sample_dtheta(1.0, 40, 20000, 51);
    const SampleBatch b = sample_dtheta(1.0, 40, 20000, 52);
    const W1Result r1 = wasserstein1_empirical(a, b, 60, 1234, 1);
    const W1Result r2 = wasserstein1_empirical(a, b, 60, 1234, 8);
    CHECK(r1.estimate == r2.estimate);
    CHECK(r1.std_error == r2.std_error);
    CHECK(r1.std_error > 0.0);
    // Two independent same-law batches sit at the noise floor.
    CHECK(r1.estimate <= 0.05);
    const W1Result other = wasserstein1_empirical(a, b, 60, 999, 4);
    CHECK(other.estimate == r1.estimate);
    CHECK(other.std_error != r1.std_error);
}

TEST_CASE("the smooth dictionary is Lipschitz and correctly shaped") {
    const std::vector<TestFn> dict = h11_dictionary({0.8, 1.6});
    REQUIRE(dict.size() == 7);
    CHECK(dict[0].name == "x");
    CHECK(dict[5].name == "hinge(0.8)");
    for (const TestFn& fn : dict) {
        for (int i = 0; i < 40; ++i) {
            const double x = 0.1 * i;
            const double slope = (fn.h(x + 1e-7) - fn.h(x)) / 1e-7;
            CHECK(std::fabs(slope) <= 1.0 + 1e-5);
        }
    }
    // Mollified hinge: flat well below, unit slope well above, smooth knee.
    const TestFn& hinge = dict[5];
    CHECK(hinge.h(0.2) == 0.0);
    CHECK(hinge.h(0.8) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(hinge.h(2.0) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("smooth lower bound stays below the transport distance") {
    const SampleBatch a = sample_dtheta(1.0, 5, 50000, 61);
    const SampleBatch b = sample_dtheta(1.0, 40, 50000, 62);
    const W1Result w = wasserstein1_empirical(a, b, 100, 7);
    const SmoothDistance sm = smooth_distance_lower(a, b, h11_dictionary({0.5, 1.0, 2.0}));
    CHECK(sm.value > 0.0);
    CHECK_FALSE(sm.witness.empty());
    CHECK(sm.value <= w.estimate + 5.0 * (sm.std_error + w.std_error));
    const SmoothDistance same = smooth_distance_lower(a, a, h11_dictionary({1.0}));
    CHECK(same.value == 0.0);
}

TEST_CASE("reference batches carry their certificates") {
    const SampleBatch ref = reference_oracle(1.0, 1e-3, 1000, 77);
    CHECK(ref.values.size() == 1000);
    CHECK(ref.depth_n == 10);
    REQUIRE(ref.certified_d1.has_value());
    CHECK(*ref.certified_d1 == doctest::Approx(0x1.0p-10).epsilon(1e-15));
}

TEST_CASE("quantiles use the nearest-rank convention") {
    std::vector<double> vals;
    for (int i = 100; i >= 1; --i) vals.push_back(static_cast<double>(i));
    const SampleBatch b = make_batch(vals);
    const std::vector<double> q = batch_quantiles(b, {0.0, 0.5, 0.999, 1.0});
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 51.0);
    CHECK(q[2] == 100.0);
    CHECK(q[3] == 100.0);
    CHECK_THROWS_AS((void)batch_quantiles(b, {1.5}), std::invalid_argument);
}

TEST_CASE("two-sample statistic and threshold reproduce known values") {
    const SampleBatch a = make_batch({1.0, 2.0, 3.0});
    const SampleBatch b = make_batch({1.5, 2.5, 3.5});
    CHECK(ks_statistic(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(ks_statistic(a, a) == 0.0);
    CHECK(ks_threshold(100000, 100000, 0.001) == doctest::Approx(0.0087177).epsilon(1e-4));
    CHECK_THROWS_AS((void)ks_threshold(0, 10, 0.05), std::invalid_argument);
    CHECK_THROWS_AS((void)ks_threshold(10, 10, 0.0), std::invalid_argument);
}

TEST_CASE("same-law batches pass the two-sample gate at level 0.001") {
    const std::size_t m = 100000;
    const SampleBatch a = sample_dtheta(1.0, 40, m, 81);
    const SampleBatch b = sample_dtheta(1.0, 40, m, 82);
    CHECK(ks_statistic(a, b) < ks_threshold(m, m, 0.001));
}

TEST_CASE("gaussian and chi-square quantiles match reference tables") {
    CHECK(normal_quantile(0.999) == doctest::Approx(3.090232306167814).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(std::fabs(normal_quantile(0.5)) < 1e-12);
    CHECK(normal_quantile(0.25) == doctest::Approx(-normal_quantile(0.75)).epsilon(1e-12));
    CHECK_THROWS_AS((void)normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)normal_quantile(1.0), std::invalid_argument);

    // Cube-root normal approximation: accurate to a percent for df >= 10.
    CHECK(chi_square_quantile(10, 0.95) == doctest::Approx(18.307).epsilon(0.01));
    CHECK(chi_square_quantile(100, 0.999) == doctest::Approx(149.449).epsilon(0.01));
    CHECK(chi_square_quantile(1, 0.95) == doctest::Approx(3.841).epsilon(0.08));
    CHECK_THROWS_AS((void)chi_square_quantile(0.0, 0.5), std::invalid_argument);
}

TEST_CASE("stochastic domination detects order and disorder") {
    const std::size_t m = 100000;
    const SampleBatch small = sample_dtheta(1.0, 4, m, 91);
    const SampleBatch large = sample_dtheta(1.0, 12, m, 91);
    const DominationCheck ok = survival_domination(small, large);
    CHECK(ok.dominated);
    CHECK(ok.max_violation <= ok.tolerance);
    const DominationCheck reversed = survival_domination(large, small);
    CHECK_FALSE(reversed.dominated);
}

TEST_CASE("the claim registry names each shipped bound once") {
    const std::vector<ClaimInfo>& claims = list_claims();
    CHECK(claims.size() == 9);
    std::vector<std::string> ids;
    for (const ClaimInfo& c : claims) {
        CHECK_FALSE(c.summary.empty());
        ids.push_back(c.id);
    }
    std::sort(ids.begin(), ids.end());
    CHECK(std::unique(ids.begin(), ids.end()) == ids.end());
    CHECK(std::find(ids.begin(), ids.end(), "size-bias") != ids.end());
    CHECK(std::find(ids.begin(), ids.end(), "recursion-decay") != ids.end());
}

TEST_CASE("claim checks dispatch and verdict sanely at small sizes") {
    ClaimParams p;
    p.num_samples = 50000;
    p.seed = 11;

    SUBCASE("unknown ids are rejected") {
        CHECK_THROWS_AS((void)check_bound("no-such-claim", p), std::invalid_argument);
    }
    SUBCASE("per-depth contraction of the base recursion") {
        const BoundReport r = check_bound("recursion-decay", p);
        CHECK(r.claim_id == "recursion-decay");
        CHECK(r.theoretical == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::fabs(r.empirical - 0.5) < 0.05);
        CHECK(r.verdict != Verdict::fail);
    }
    SUBCASE("utility recursion certificate") {
        p.utility = Utility::log_shift();
        const BoundReport r = check_bound("utility-recursion", p);
        CHECK(r.verdict != Verdict::fail);
        CHECK(r.empirical <= r.theoretical + 5.0 * r.mc_stderr + r.slack);
    }
    SUBCASE("drift constants level off for the arithmetic families") {
        p.n = 20000;
        const BoundReport geo = check_bound("prime-geometric", p);
        CHECK(geo.verdict == Verdict::pass);
        // The fitted constant approximates the known drift limit 0.5772.
        CHECK(std::fabs(geo.theoretical - 0.5772156649015329) < 0.15);
        const BoundReport bern = check_bound("prime-bernoulli", p);
        CHECK(bern.verdict == Verdict::pass);
    }
    SUBCASE("log-ratio coupling bound") {
        p.n = 2000;
        const BoundReport r = check_bound("prime-poisson-logratio", p);
        CHECK(r.verdict == Verdict::pass);
        CHECK(r.empirical <= r.theoretical);
    }
    SUBCASE("size-bias identity via the registry") {
        p.n = 500;
        p.marks = "geometric";
        const BoundReport r = check_bound("size-bias", p);
        CHECK(r.claim_id == std::string("size-bias:geometric"));
        CHECK(r.verdict != Verdict::fail);
    }
}

}  // TEST_SUITE
