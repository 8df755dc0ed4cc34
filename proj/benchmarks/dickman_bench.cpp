// SPDX-License-Identifier: MIT
//
// Microbenchmarks for the hot paths: counter RNG throughput, recursion
// sampling, sieving, the matched order-statistics W1, and the equation
// solver.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "dickman/dickman.hpp"
#include "dickman/metrics.hpp"
#include "dickman/primes.hpp"
#include "dickman/rng.hpp"
#include "dickman/stein.hpp"
#include "dickman/utility.hpp"
#include "dickman/weighted_sums.hpp"

namespace {

using namespace dickman;

void BM_CounterRngU64(benchmark::State& state) {
    std::uint64_t acc = 0;
    std::uint64_t i = 0;
    CounterRng rng(42, 0);
    for (auto _ : state) {
        acc ^= rng.u64_at(i++);
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_CounterRngU64);

void BM_SampleRecursion(benchmark::State& state) {
    const auto depth = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        SampleBatch batch = sample_dtheta(1.0, depth, 10000, 7, 1);
        benchmark::DoNotOptimize(batch.values.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_SampleRecursion)->Arg(10)->Arg(40);

void BM_SampleUtilityRecursion(benchmark::State& state) {
    const DickmanSpec spec(1.0, Utility::log_shift());
    for (auto _ : state) {
        SampleBatch batch = sample_dtheta_s(spec, 20, 2000, 7, 1);
        benchmark::DoNotOptimize(batch.values.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 2000);
}
BENCHMARK(BM_SampleUtilityRecursion);

void BM_WeightedSum(benchmark::State& state) {
    const SumSpec spec(static_cast<std::uint64_t>(state.range(0)), SumMarks::bernoulli);
    for (auto _ : state) {
        SampleBatch batch = sample_weighted_sum(spec, 1000, 7, 1);
        benchmark::DoNotOptimize(batch.values.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000);
}
BENCHMARK(BM_WeightedSum)->Arg(100)->Arg(10000);

void BM_Sieve(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        std::vector<std::uint64_t> primes = first_primes(n);
        benchmark::DoNotOptimize(primes.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Sieve)->Arg(100000)->Arg(1000000);

void BM_Wasserstein1(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const SampleBatch a = sample_dtheta(1.0, 20, m, 1, 1);
    const SampleBatch b = sample_dtheta(1.0, 20, m, 2, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wasserstein1_estimate(a, b));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(m));
}
BENCHMARK(BM_Wasserstein1)->Arg(10000)->Arg(100000);

void BM_SolveStein(benchmark::State& state) {
    const DickmanSpec spec(1.0, Utility::identity());
    for (auto _ : state) {
        SteinSolution sol = solve_stein(spec, cos_test(), 1e-6, 10.0);
        benchmark::DoNotOptimize(sol.residual_max);
    }
}
BENCHMARK(BM_SolveStein);

}  // namespace

BENCHMARK_MAIN();
