#include <benchmark/benchmark.h>

#include "ocsvm/dataset.hpp"
#include "ocsvm/train.hpp"

namespace {

ocsvm::Dataset blob(std::size_t n, std::size_t d, std::uint64_t seed) {
    ocsvm::GaussianComponent comp;
    comp.mean.assign(d, 0.0);
    comp.mean[0] = 3.0;
    comp.covariance.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) comp.covariance[i * d + i] = 1.0;
    comp.count = n;
    return ocsvm::synth_gaussian({&comp, 1}, seed);
}

// Linear models collapse to a single weight vector, so scoring cost is
// independent of the support-vector count; RBF models pay per SV.
void predict_linear(benchmark::State& state) {
    const ocsvm::Dataset train = blob(256, 32, 3);
    const ocsvm::Dataset probe = blob(4096, 32, 4);
    const auto model = ocsvm::train_one_class_c(train, 1.0, ocsvm::KernelSpec::linear());
    for (auto _ : state) {
        auto values = model.decision_values(probe);
        benchmark::DoNotOptimize(values.data());
    }
    state.SetItemsProcessed(static_cast<benchmark::IterationCount>(state.iterations()) * 4096);
}
BENCHMARK(predict_linear);

void predict_rbf(benchmark::State& state) {
    const ocsvm::Dataset train = blob(256, 32, 3);
    const ocsvm::Dataset probe = blob(4096, 32, 4);
    const auto model = ocsvm::train_one_class_nu(train, 0.5, ocsvm::KernelSpec::rbf(0.05));
    for (auto _ : state) {
        auto values = model.decision_values(probe);
        benchmark::DoNotOptimize(values.data());
    }
    state.SetItemsProcessed(static_cast<benchmark::IterationCount>(state.iterations()) * 4096);
}
BENCHMARK(predict_rbf);

} // namespace

BENCHMARK_MAIN();
