// Serial-vs-OpenMP comparison for the hot paths: pairwise distance and
// kernel matrix assembly, plus fold-parallel cross-validation.

#include <benchmark/benchmark.h>

#include "encergy/corpus.hpp"
#include "encergy/evaluation.hpp"
#include "encergy/kernels.hpp"
#include "encergy/rng.hpp"

namespace {

using namespace encergy;

Eigen::MatrixXd random_design(int n) {
    Rng rng(12345);
    Eigen::MatrixXd X(n, kFeatureDim);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (int j = 1; j < kFeatureDim; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
    }
    return X;
}

void BM_DistanceMatrixSerial(benchmark::State& state) {
    const Eigen::MatrixXd X = random_design(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Eigen::MatrixXd D = distance_matrix_serial(X);
        benchmark::DoNotOptimize(D.data());
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_DistanceMatrixSerial)->Arg(128)->Arg(256)->Arg(512);

void BM_DistanceMatrixParallel(benchmark::State& state) {
    const Eigen::MatrixXd X = random_design(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Eigen::MatrixXd D = distance_matrix(X);
        benchmark::DoNotOptimize(D.data());
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_DistanceMatrixParallel)->Arg(128)->Arg(256)->Arg(512);

void BM_KernelMatrixSerialReference(benchmark::State& state) {
    const Eigen::MatrixXd X = random_design(static_cast<int>(state.range(0)));
    const Hyperparams hp{2.0, 1.5, 0.1};
    for (auto _ : state) {
        Eigen::MatrixXd K = kernel_matrix_serial(X, hp);
        benchmark::DoNotOptimize(K.data());
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_KernelMatrixSerialReference)->Arg(128)->Arg(256)->Arg(512);

void BM_KernelMatrixParallel(benchmark::State& state) {
    const Eigen::MatrixXd X = random_design(static_cast<int>(state.range(0)));
    const Hyperparams hp{2.0, 1.5, 0.1};
    for (auto _ : state) {
        Eigen::MatrixXd K = kernel_matrix(X, hp);
        benchmark::DoNotOptimize(K.data());
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_KernelMatrixParallel)->Arg(128)->Arg(256)->Arg(512);

Dataset bench_corpus() {
    CorpusSpec spec = default_corpus_spec();
    spec.sequences_per_class = 1;
    spec.qp_grid[Standard::H264] = {22, 37};
    spec.qp_grid[Standard::H265] = {22, 37};
    spec.qp_grid[Standard::AV1] = {108, 184};
    return generate_corpus(spec, default_oracle_params()); // 60 samples
}

FitOptions bench_fit_options() {
    FitOptions opts;
    opts.restarts = 2;
    opts.max_iterations = 40;
    return opts;
}

void BM_CrossValidateSerialFolds(benchmark::State& state) {
    const Dataset corpus = bench_corpus();
    for (auto _ : state) {
        const CvReport report =
            cross_validate(corpus, ModelKind::Gpr, 5, 42, bench_fit_options(), false);
        benchmark::DoNotOptimize(report.mape_percent);
    }
}
BENCHMARK(BM_CrossValidateSerialFolds)->Unit(benchmark::kMillisecond);

void BM_CrossValidateParallelFolds(benchmark::State& state) {
    const Dataset corpus = bench_corpus();
    for (auto _ : state) {
        const CvReport report =
            cross_validate(corpus, ModelKind::Gpr, 5, 42, bench_fit_options(), true);
        benchmark::DoNotOptimize(report.mape_percent);
    }
}
BENCHMARK(BM_CrossValidateParallelFolds)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
