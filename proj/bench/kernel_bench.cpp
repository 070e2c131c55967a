// Serial-versus-parallel timings for the hot kernels. Build with
// -DCMAKE_BUILD_TYPE=Release and run ./bench/kernel_bench; the *_serial
// entries are the single-thread reference implementations.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "srrc/kernels.hpp"
#include "srrc/saliency.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = gauss(rng);
    return v;
}

void bm_dense_matvec(benchmark::State& state, bool parallel) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_vector(n * n, 1);
    const auto x = random_vector(n, 2);
    std::vector<double> y(n);
    for (auto _ : state) {
        if (parallel)
            srrc::kernels::dense_matvec(a, x, y, n, n);
        else
            srrc::kernels::dense_matvec_serial(a, x, y, n, n);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n * n));
}

void bm_csr_matvec(benchmark::State& state, bool parallel) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto dense = random_vector(n * n, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (auto& v : dense)
        if (coin(rng) > 0.1) v = 0.0;
    const auto csr = srrc::kernels::CsrMatrix::from_dense(dense, n, n);
    const auto x = random_vector(n, 5);
    std::vector<double> y(n);
    for (auto _ : state) {
        if (parallel)
            srrc::kernels::csr_matvec(csr, x, y);
        else
            srrc::kernels::csr_matvec_serial(csr, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(csr.values.size()));
}

void bm_block_sum(benchmark::State& state, bool parallel) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto v = random_vector(n, 6);
    for (auto _ : state) {
        const double s = parallel ? srrc::kernels::block_sum(v)
                                  : srrc::kernels::block_sum_serial(v);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}

void bm_weighted_feature_sum(benchmark::State& state, bool parallel) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 100;
    const auto x = random_vector(rows * dim, 7);
    const auto r = random_vector(rows, 8);
    std::vector<double> g(dim);
    for (auto _ : state) {
        std::fill(g.begin(), g.end(), 0.0);
        if (parallel)
            srrc::kernels::weighted_feature_sum(x, rows, dim, r, g);
        else
            srrc::kernels::weighted_feature_sum_serial(x, rows, dim, r, g);
        benchmark::DoNotOptimize(g.data());
    }
}

void bm_saliency_map(benchmark::State& state, bool parallel) {
    srrc::LabeledSeries series;
    series.values = random_vector(static_cast<std::size_t>(state.range(0)), 9);
    srrc::SaliencyConfig config;
    for (auto _ : state) {
        const auto map = parallel ? srrc::build_saliency_map(series, config)
                                  : srrc::build_saliency_map_serial(series, config);
        benchmark::DoNotOptimize(map.values.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(bm_dense_matvec, parallel, true)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_dense_matvec, serial, false)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_csr_matvec, parallel, true)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_csr_matvec, serial, false)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_block_sum, parallel, true)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_block_sum, serial, false)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_weighted_feature_sum, parallel, true)->Arg(2048)->Arg(16384);
BENCHMARK_CAPTURE(bm_weighted_feature_sum, serial, false)->Arg(2048)->Arg(16384);
BENCHMARK_CAPTURE(bm_saliency_map, parallel, true)->Arg(3000)->Arg(30000);
BENCHMARK_CAPTURE(bm_saliency_map, serial, false)->Arg(3000)->Arg(30000);

BENCHMARK_MAIN();
