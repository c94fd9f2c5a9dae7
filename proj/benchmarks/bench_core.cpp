#include <benchmark/benchmark.h>

#include <random>

#include "igmdsr/model.hpp"
#include "igmdsr/nmf_baseline.hpp"
#include "igmdsr/preprocess.hpp"
#include "igmdsr/training.hpp"

namespace {

using igmdsr::index_t;
using igmdsr::Matrix;

Matrix random_matrix(index_t rows, index_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = dist(rng);
    return m;
}

// 200 samples, 128 raw features -> 256 folded columns
Matrix bench_input() { return igmdsr::fold(random_matrix(200, 128, 11)).x; }

void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<index_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(igmdsr::matmul(a, b));
    }
}
BENCHMARK(BM_matmul)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_forward(benchmark::State& state) {
    const Matrix x0 = bench_input();
    const igmdsr::ArchitectureSpec spec({256, 64, 32, 8}, igmdsr::Variant::nmf);
    const igmdsr::ModelParams params = igmdsr::xavier_init(spec, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(igmdsr::forward(params, x0));
    }
}
BENCHMARK(BM_forward);

void BM_backward(benchmark::State& state) {
    const Matrix x0 = bench_input();
    const igmdsr::ArchitectureSpec spec({256, 64, 32, 8}, igmdsr::Variant::nmf);
    const igmdsr::ModelParams params = igmdsr::xavier_init(spec, 3);
    const igmdsr::ForwardTrace trace = igmdsr::forward(params, x0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(igmdsr::backward(trace, params, x0));
    }
}
BENCHMARK(BM_backward);

// one full epoch (forward + backward + Adam) with the first hidden width
// swept; the per-epoch cost should scale roughly linearly in it
void BM_train_epoch(benchmark::State& state) {
    const auto r1 = static_cast<index_t>(state.range(0));
    const Matrix x0 = bench_input();
    const igmdsr::ArchitectureSpec spec({256, r1, 32, 8}, igmdsr::Variant::nmf);
    igmdsr::ModelParams params = igmdsr::xavier_init(spec, 3);
    igmdsr::AdamState adam = igmdsr::AdamState::zeros_like(params);
    const igmdsr::TrainConfig cfg;
    for (auto _ : state) {
        const igmdsr::ForwardTrace trace = igmdsr::forward(params, x0);
        const igmdsr::Gradients grads = igmdsr::backward(trace, params, x0);
        igmdsr::adam_step(params, grads, adam, cfg);
        benchmark::DoNotOptimize(params.w.data().data());
    }
}
BENCHMARK(BM_train_epoch)->Arg(64)->Arg(128);

void BM_nmf_iterations(benchmark::State& state) {
    const Matrix x = igmdsr::fold(random_matrix(100, 32, 5)).x;
    for (auto _ : state) {
        benchmark::DoNotOptimize(igmdsr::nmf_multiplicative(x, 8, 10, 7));
    }
}
BENCHMARK(BM_nmf_iterations);

}  // namespace

BENCHMARK_MAIN();
