#include <benchmark/benchmark.h>

#include "minent/entropy.hpp"
#include "minent/jacobian.hpp"
#include "minent/rng.hpp"
#include "minent/wedge.hpp"

using namespace minent;

static void BM_WedgeDistance(benchmark::State& state) {
    WedgeSpace chain = chain_fixture();
    Rng rng(99);
    std::vector<std::pair<PointRef, PointRef>> pairs;
    for (int i = 0; i < 256; ++i) {
        pairs.push_back({{0, {rng.uniform(-2, 2), rng.uniform(-2, 2)}},
                         {2, {rng.uniform(-2, 2), rng.uniform(-2, 2)}}});
    }
    std::size_t i = 0;
    double acc = 0.0;
    for (auto _ : state) {
        const auto& [a, b] = pairs[i++ & 255];
        acc += chain.distance(a, b);
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_WedgeDistance);

static void BM_Barycenter(benchmark::State& state) {
    WedgeSpace tri = tripod_fixture(2.0);
    PointedMeasure mu;
    Rng rng(7);
    for (int i = 0; i < int(state.range(0)); ++i) {
        mu.atoms.push_back(
            {{int(rng.next_u64() % 3), {rng.uniform(0.0, 2.0), 0.0}}, rng.uniform(0.5, 1.5)});
    }
    for (auto _ : state) {
        BarycenterResult res = barycenter(tri, mu);
        benchmark::DoNotOptimize(res.certificate);
    }
}
BENCHMARK(BM_Barycenter)->Arg(3)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_PoincarePartial(benchmark::State& state) {
    auto f2 = free_group_oracle(2);
    const double cutoff = double(state.range(0));
    for (auto _ : state) {
        PoincarePartial p = poincare_partial(*f2, 2.0, cutoff);
        benchmark::DoNotOptimize(p.value);
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(f2->count(cutoff)));
}
BENCHMARK(BM_PoincarePartial)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_JacobiIntegrate(benchmark::State& state) {
    const CurvatureSchedule schedule = make_schedule({2.0}, {-0.5}, 3.0);
    for (auto _ : state) {
        JacobiResult res = jacobi_ii(schedule, 0.0, 1.0);
        benchmark::DoNotOptimize(res.ii_at_ell);
    }
}
BENCHMARK(BM_JacobiIntegrate);

static void BM_AlgebraicMax(benchmark::State& state) {
    for (auto _ : state) {
        AlgebraicMax res = algebraic_max(3, state.range(0), 11);
        benchmark::DoNotOptimize(res.max_found);
    }
}
BENCHMARK(BM_AlgebraicMax)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
