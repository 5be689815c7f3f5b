#include <benchmark/benchmark.h>

#include "minent/profile.hpp"
#include "minent/surgery.hpp"
#include "minent/warped.hpp"

using namespace minent;

static void BM_CuspCapConstruct(benchmark::State& state) {
    const double delta = 1.0 / double(state.range(0));
    for (auto _ : state) {
        CuspCap cap = cusp_cap_profile(1.0, delta);
        benchmark::DoNotOptimize(cap.params.ell_prime);
    }
}
BENCHMARK(BM_CuspCapConstruct)->Arg(2)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_ProfileEval(benchmark::State& state) {
    CuspCap cap = cusp_cap_profile(1.0, 0.1);
    const Interval dom = cap.profile.domain();
    double t = dom.lo;
    double acc = 0.0;
    for (auto _ : state) {
        acc += cap.profile.value(t) + cap.profile.d2(t);
        t += 1e-4;
        if (t > dom.hi) t = dom.lo;
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ProfileEval);

static void BM_CurvatureScan(benchmark::State& state) {
    TorusCuspSpec spec;
    spec.a = 0.9;
    spec.b = 0.9;
    spec.zeta2 = 1.0;
    ConformalMetric cm = conformal_change(spec, 0.5);
    const double T = cm.T_delta;
    for (auto _ : state) {
        CurvatureReport rep =
            curvature_scan(cm.metric, Interval(T, 2.0 * T), state.range(0), -1.5, -1.0, 1e-3);
        benchmark::DoNotOptimize(rep.verdict);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurvatureScan)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CuspVolume(benchmark::State& state) {
    DoubleWarpedMetric3D m = make_double_warped(exp_profile(1.0), exp_profile(1.0), 1.0);
    for (auto _ : state) {
        VolumeResult v = cusp_volume(m, 0.0, 10.0);
        benchmark::DoNotOptimize(v.volume);
    }
}
BENCHMARK(BM_CuspVolume);

BENCHMARK_MAIN();
