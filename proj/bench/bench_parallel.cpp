// OpenMP kernels against their serial references.

#include <vector>

#include <benchmark/benchmark.h>

#include "rankspectra/alt_estimators.hpp"
#include "rankspectra/h_spec.hpp"
#include "rankspectra/simgen.hpp"

using namespace rankspectra;

namespace {

ScenarioConfig study_config() {
    ScenarioConfig cfg;
    cfg.id = "bench";
    cfg.n = 400;
    cfg.p = 200;
    cfg.H = parse_h_spec("H1");
    cfg.r0 = 5;
    cfg.lambda_r0 = 3.0;
    cfg.T = 16;
    cfg.master_seed = 1;
    return cfg;
}

const std::vector<Method> kMethods = {Method::AIC, Method::BIC, Method::GIC, Method::PC3, Method::IC3,
                                      Method::ACT, Method::DPA, Method::ED,  Method::GR};

void BM_RunStudy(benchmark::State& state) {
    const auto cfg = study_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_study(cfg, kMethods));
    }
}

void BM_RunStudySerial(benchmark::State& state) {
    const auto cfg = study_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_study_serial(cfg, kMethods));
    }
}

const BemaFit kFit{0.5, 1.0, 0.0};

BemaConfig bema_config() {
    BemaConfig cfg;
    cfg.M = 100;
    return cfg;
}

void BM_BemaThreshold(benchmark::State& state) {
    const auto cfg = bema_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bema_threshold(300, 150, kFit, cfg, 9));
    }
}

void BM_BemaThresholdSerial(benchmark::State& state) {
    const auto cfg = bema_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bema_threshold_serial(300, 150, kFit, cfg, 9));
    }
}

}  // namespace

BENCHMARK(BM_RunStudy)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunStudySerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BemaThreshold)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BemaThresholdSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
