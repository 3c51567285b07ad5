// Serial reference vs OpenMP kernels. Arg is the square matrix size for
// matmul and the element count for the elementwise kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vrin/kernels.hpp"

namespace k = vrin::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

template <auto Kernel>
void bm_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_vector(n * n, 1), b = random_vector(n * n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        std::fill(c.begin(), c.end(), 0.0);
        Kernel(a, b, c, n, n, n);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

template <auto Kernel>
void bm_elementwise(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_vector(n, 3);
    std::vector<double> y(n);
    for (auto _ : state) {
        Kernel(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(bm_matmul<k::serial::matmul_nn>)->Name("matmul_nn/serial")->RangeMultiplier(2)->Range(32, 512);
BENCHMARK(bm_matmul<k::parallel::matmul_nn>)->Name("matmul_nn/parallel")->RangeMultiplier(2)->Range(32, 512);
BENCHMARK(bm_matmul<k::serial::matmul_nt>)->Name("matmul_nt/serial")->Range(64, 512);
BENCHMARK(bm_matmul<k::parallel::matmul_nt>)->Name("matmul_nt/parallel")->Range(64, 512);
BENCHMARK(bm_matmul<k::serial::matmul_tn>)->Name("matmul_tn/serial")->Range(64, 512);
BENCHMARK(bm_matmul<k::parallel::matmul_tn>)->Name("matmul_tn/parallel")->Range(64, 512);
BENCHMARK(bm_elementwise<k::serial::tanh>)->Name("tanh/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(bm_elementwise<k::parallel::tanh>)->Name("tanh/parallel")->Range(1 << 10, 1 << 20);
BENCHMARK(bm_elementwise<k::serial::sigmoid>)->Name("sigmoid/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(bm_elementwise<k::parallel::sigmoid>)->Name("sigmoid/parallel")->Range(1 << 10, 1 << 20);
BENCHMARK(bm_elementwise<k::serial::exp>)->Name("exp/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(bm_elementwise<k::parallel::exp>)->Name("exp/parallel")->Range(1 << 10, 1 << 20);

BENCHMARK_MAIN();
