// Serial reference loops against the OpenMP kernels.  Set WEYL_THREADS to cap
// the parallel runs.
#include "weyl/estimates.hpp"
#include "weyl/fixtures.hpp"
#include "weyl/parallel.hpp"

#include <benchmark/benchmark.h>

using namespace weyl;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state)
{
    state.SetLabel(state.range(1) ? "parallel x" + std::to_string(max_threads()) : "serial");
}

void BM_shape_of(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const RadialGraph g = fixture_graph("mixed", preset("schwarzschild-m1"), SphereGrid(n, 2 * n));
    for (auto _ : state) benchmark::DoNotOptimize(shape_of(g, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * g.grid().size());
    label(state);
}

void BM_intrinsic_curvature(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const Metric2S m = induced_metric(fixture_graph("mixed", WarpSpec::hyperbolic(), SphereGrid(n, 2 * n)));
    for (auto _ : state) benchmark::DoNotOptimize(intrinsic_curvature(m, PsiScheme::fd6, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * m.grid().size());
    label(state);
}

void BM_bound_certificate(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const std::vector<RadialGraph> fam = hyperbolic_family(SphereGrid(n, 2 * n));
    for (auto _ : state) benchmark::DoNotOptimize(bound_certificate(fam, exec_of(state)));
    label(state);
}

} // namespace

BENCHMARK(BM_shape_of)->ArgsProduct({{64, 128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_intrinsic_curvature)->ArgsProduct({{64, 128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bound_certificate)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    apply_thread_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
