// Parallel kernels against their serial references on synthetic data.

#include <benchmark/benchmark.h>

#include <random>

#include "tsgp/classifier.hpp"
#include "tsgp/program.hpp"

using namespace tsgp;

namespace {

Dataset synthetic(std::size_t n, std::size_t L)
{
    std::mt19937_64 gen(1);
    std::normal_distribution<double> g(0.0, 1.0);
    Dataset d;
    d.class_labels = {0, 1};
    d.original_labels = {0, 1};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(L);
        for (auto& v : x) {
            v = g(gen) + static_cast<double>(i % 2);
        }
        d.series.push_back({x, static_cast<int>(i % 2)});
    }
    return d;
}

ProgramTree bench_tree(std::size_t L)
{
    const Node a = make_extractor(Op::ShapePeak, make_patch(make_domain(Op::DomFreq, make_input()), 8), 0.5);
    const Node b = make_extractor(Op::StatisDist, make_patch(make_domain(Op::DomDiff, make_input()), 4), 0.5);
    return {make_concat({a, b}), L};
}

Exec policy(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Transform(benchmark::State& state)
{
    const Dataset d = synthetic(200, 256);
    const ProgramTree t = bench_tree(256);
    for (auto _ : state) {
        benchmark::DoNotOptimize(transform_dataset(t, d, policy(state)));
    }
}

void BM_FitExtraTrees(benchmark::State& state)
{
    const FeatureMatrix x = transform_dataset(bench_tree(256), synthetic(200, 256), Exec::Serial);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_extra_trees(x, x.labels, 100, 1, 2, policy(state)));
    }
}

void BM_Predict1nn(benchmark::State& state)
{
    const FeatureMatrix train = to_matrix(synthetic(300, 256));
    const FeatureMatrix test = to_matrix(synthetic(600, 256));
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_1nn(train, test, policy(state)));
    }
}

} // namespace

// Arg 0 runs the serial reference, 1 the OpenMP path.
BENCHMARK(BM_Transform)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitExtraTrees)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Predict1nn)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
