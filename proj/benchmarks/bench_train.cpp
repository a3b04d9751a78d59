#include <benchmark/benchmark.h>

#include "prnuda/runner.hpp"
#include "prnuda/selftrain.hpp"

using namespace prnuda;

namespace {

RunConfig bench_cfg(bool full) {
    RunConfig cfg;
    cfg.source_count = 4;
    cfg.target_count = 4;
    cfg.val_count = 1;
    if (!full) cfg.sw = {true, false, false, false, false};
    return cfg;
}

void BM_train_step_plain_st(benchmark::State& state) {
    RunConfig cfg = bench_cfg(false);
    DatasetBundle data = prepare_data(cfg);
    TrainerState trainer = make_trainer(cfg);
    StepBatch batch{&data.source_train[0].image, &data.source_train[0].label,
                    &data.target_train[0].image, 0};
    for (auto _ : state) benchmark::DoNotOptimize(train_step(trainer, batch, cfg));
}
BENCHMARK(BM_train_step_plain_st)->Unit(benchmark::kMillisecond);

void BM_train_step_full(benchmark::State& state) {
    RunConfig cfg = bench_cfg(true);
    DatasetBundle data = prepare_data(cfg);
    TrainerState trainer = make_trainer(cfg);
    StepBatch batch{&data.source_train[0].image, &data.source_train[0].label,
                    &data.target_train[0].image, 0};
    for (auto _ : state) benchmark::DoNotOptimize(train_step(trainer, batch, cfg));
}
BENCHMARK(BM_train_step_full)->Unit(benchmark::kMillisecond);

void BM_encode_decode(benchmark::State& state) {
    RunConfig cfg = bench_cfg(false);
    DatasetBundle data = prepare_data(cfg);
    ModelState m = make_model(cfg.arch(), ModelKind::Segmenter, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(decode(m, encode(m, data.target_train[0].image)));
}
BENCHMARK(BM_encode_decode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
