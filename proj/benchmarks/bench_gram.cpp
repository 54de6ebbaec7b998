#include <benchmark/benchmark.h>

#include "ocsvm/dataset.hpp"
#include "ocsvm/kernel.hpp"

namespace {

ocsvm::Dataset make_data(std::size_t n, std::size_t d) {
    ocsvm::GaussianComponent comp;
    comp.mean.assign(d, 0.5);
    comp.covariance.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) comp.covariance[i * d + i] = 1.0;
    comp.count = n;
    return ocsvm::synth_gaussian({&comp, 1}, 7);
}

std::vector<ocsvm::SignedIndex> reflected_items(std::size_t n) {
    std::vector<ocsvm::SignedIndex> items;
    items.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) items.push_back({i, +1});
    for (std::size_t i = 0; i < n; ++i) items.push_back({i, -1});
    return items;
}

void gram_linear(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const ocsvm::Dataset data = make_data(n, 64);
    const auto items = reflected_items(n);
    const ocsvm::KernelSpec spec = ocsvm::KernelSpec::linear();
    for (auto _ : state) {
        auto g = ocsvm::gram(spec, items, data);
        benchmark::DoNotOptimize(g.data());
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(gram_linear)->Arg(64)->Arg(256)->Arg(512)->Complexity(benchmark::oNSquared);

void gram_rbf_threads(benchmark::State& state) {
    const std::size_t n = 384;
    const int threads = static_cast<int>(state.range(0));
    const ocsvm::Dataset data = make_data(n, 64);
    const auto items = reflected_items(n);
    const ocsvm::KernelSpec spec = ocsvm::KernelSpec::rbf(0.05);
    for (auto _ : state) {
        auto g = ocsvm::gram(spec, items, data, threads);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(gram_rbf_threads)->Arg(1)->Arg(2)->Arg(4);

} // namespace
