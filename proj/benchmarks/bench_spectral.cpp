#include <benchmark/benchmark.h>

#include "prnuda/rng.hpp"
#include "prnuda/spectral.hpp"

using namespace prnuda;

namespace {

Grid2D random_grid(int c, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Grid2D g(c, h, w);
    for (double& v : g.data) v = rng.uniform(-3.0, 3.0);
    return g;
}

void BM_fft2(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Grid2D g = random_grid(5, n, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(fft2(g));
}
BENCHMARK(BM_fft2)->Arg(32)->Arg(64)->Arg(128);

void BM_perturb_logits(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Grid2D a = random_grid(5, n, n, 2);
    Grid2D b = random_grid(5, n, n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(perturb_logits(a, b, 0.1));
}
BENCHMARK(BM_perturb_logits)->Arg(64);

void BM_fda_image(benchmark::State& state) {
    Rng rng(4);
    Grid2D x(3, 64, 64), y(3, 64, 64);
    for (double& v : x.data) v = rng.uniform();
    for (double& v : y.data) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(fda_image(x, y, 0.005));
}
BENCHMARK(BM_fda_image);

}  // namespace
