#include <benchmark/benchmark.h>

#include "ocsvm/dataset.hpp"
#include "ocsvm/train.hpp"

namespace {

// Two moderately separated blobs make the box constraints bite without
// stalling convergence, which is the regime the solver lives in.
ocsvm::Dataset training_blob(std::size_t n, std::size_t d) {
    ocsvm::GaussianComponent comp;
    comp.mean.assign(d, 0.0);
    comp.mean[0] = 3.0;
    comp.covariance.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) comp.covariance[i * d + i] = 1.0;
    comp.count = n;
    return ocsvm::synth_gaussian({&comp, 1}, 11);
}

void train_margin_threshold(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const ocsvm::Dataset data = training_blob(n, 16);
    for (auto _ : state) {
        auto model = ocsvm::train_one_class_nu(data, 0.2, ocsvm::KernelSpec::rbf(0.1));
        benchmark::DoNotOptimize(model.bias());
    }
}
BENCHMARK(train_margin_threshold)->Arg(64)->Arg(128)->Arg(256);

void train_reflected(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const ocsvm::Dataset data = training_blob(n, 16);
    for (auto _ : state) {
        auto model = ocsvm::train_one_class_c(data, 1.0, ocsvm::KernelSpec::linear());
        benchmark::DoNotOptimize(model.bias());
    }
}
BENCHMARK(train_reflected)->Arg(64)->Arg(128)->Arg(256);

void train_with_universum(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const ocsvm::Dataset data = training_blob(n, 16);
    const ocsvm::Dataset universum = training_blob(n / 2, 16);
    ocsvm::HyperParams params;
    params.c = 1.0;
    params.c_star = 0.5;
    for (auto _ : state) {
        auto model = ocsvm::train_one_class_universum(data, universum, params);
        benchmark::DoNotOptimize(model.bias());
    }
}
BENCHMARK(train_with_universum)->Arg(64)->Arg(128);

} // namespace
