#include "sigflow/kernels.hpp"
#include "sigflow/mintime.hpp"
#include "sigflow/shapes.hpp"
#include "sigflow/topology.hpp"

#include <benchmark/benchmark.h>

using namespace sigflow;

namespace {

const DistanceField& lshape()
{
    static const DistanceField f(make_scene(shapes::lshape()));
    return f;
}

const DistanceField& ellipse()
{
    static const DistanceField f(make_scene(shapes::ellipse(512, 2.0, 1.0)));
    return f;
}

const DistanceField& control()
{
    static const DistanceField f(
        make_scene(shapes::square(), metric_from_control(ConstantControl{2.0 * Mat2::Identity()}), std::nullopt, 0.02));
    return f;
}

Execution policy(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) ? "parallel" : "serial"); }

void BM_batch_lshape(benchmark::State& s)
{
    const auto seeds = interior_samples(lshape(), 64);
    FlowOptions o;
    o.dt = 1e-2;
    for (auto _ : s) benchmark::DoNotOptimize(integrate_batch(lshape(), seeds, homotopy_horizon(lshape()), o, policy(s)));
    label(s);
}

void BM_skeleton_ellipse(benchmark::State& s)
{
    for (auto _ : s) benchmark::DoNotOptimize(extract_skeleton(ellipse(), 129, policy(s)));
    label(s);
}

void BM_classify_control(benchmark::State& s)
{
    const auto pts = interior_samples(control(), 4096);
    for (auto _ : s) benchmark::DoNotOptimize(classify_points(control(), pts, policy(s)));
    label(s);
}

void BM_hjb_control(benchmark::State& s)
{
    for (auto _ : s) benchmark::DoNotOptimize(hjb_residual(control(), 0, policy(s)));
    label(s);
}

} // namespace

BENCHMARK(BM_batch_lshape)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_skeleton_ellipse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_classify_control)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hjb_control)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
