// SPDX-License-Identifier: MIT
#include <cmath>
#include <vector>

#include "dickman/kahan.hpp"
#include "dickman/parallel.hpp"
#include "dickman/quadrature.hpp"
#include "doctest.h"

using namespace dickman;

TEST_SUITE("quadrature") {

TEST_CASE("compensated summation survives catastrophic cancellation") {
    KahanSum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<double> tenths(1000000, 0.1);
    CHECK(kahan_total(tenths) == doctest::Approx(100000.0).epsilon(1e-14));
    CHECK(kahan_mean(tenths) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("adaptive bisection integration hits smooth references") {
    const double pi = 3.14159265358979323846;
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, pi, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-11));
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-11));
    CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 3.0, 1e-12) ==
          doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("seven-point Gauss rule is exact through degree 13") {
    // integral_0^1 x^13 dx = 1/14, the highest monomial a 7-point rule must nail.
    CHECK(gauss7([](double x) { return std::pow(x, 13); }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 14.0).epsilon(1e-14));
    CHECK(gauss7([](double x) { return std::pow(2.0 * x - 1.0, 12); }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 13.0).epsilon(1e-13));
}

TEST_CASE("dyadic refinement handles integrable endpoint singularities") {
    CHECK(integrate_left_singular([](double x) { return 1.0 / std::sqrt(x); }, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate_left_singular([](double x) { return std::log(x); }, 1.0) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(integrate_left_singular([](double x) { return std::pow(x, -0.25); }, 16.0) ==
          doctest::Approx(std::pow(16.0, 0.75) / 0.75).epsilon(1e-12));
}

TEST_CASE("zero-split integration combines the singular head with the smooth tail") {
    CHECK(integrate_zero_split([](double x) { return 1.0 / std::sqrt(x); }, 4.0, 1e-10) ==
          doctest::Approx(4.0).epsilon(1e-9));
    CHECK(integrate_zero_split([](double x) { return std::log(x); }, 2.0, 1e-10) ==
          doctest::Approx(2.0 * std::log(2.0) - 2.0).epsilon(1e-9));
    CHECK(integrate_zero_split([](double x) { return std::cos(x); }, 1.5, 1e-10) ==
          doctest::Approx(std::sin(1.5)).epsilon(1e-9));
}

TEST_CASE("chunked parallel loops cover every index exactly once") {
    for (unsigned threads : {1u, 2u, 5u, 16u}) {
        std::vector<int> hits(1003, 0);
        parallel_for(0, hits.size(), threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) hits[i] += 1;
        });
        for (int h : hits) CHECK(h == 1);
    }
    // Empty range is a no-op.
    parallel_for(5, 5, 4, [&](std::size_t, std::size_t) { CHECK(false); });
}

}  // TEST_SUITE
