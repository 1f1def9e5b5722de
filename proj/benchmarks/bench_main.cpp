#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ivtf/ar.hpp"
#include "ivtf/iv_core.hpp"
#include "ivtf/mc_sim.hpp"
#include "ivtf/rng.hpp"
#include "ivtf/tf.hpp"

using namespace ivtf;

namespace {

const CVTable& cv5()
{
    static const CVTable t = load_cv_table(std::string(IVTF_BENCH_DATA_DIR) + "/cv_tf_05.csv", 0.05);
    return t;
}

void BM_Philox(benchmark::State& state)
{
    CounterRng rng(derive_key(1, 2), 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_Philox);

void BM_CvLookup(benchmark::State& state)
{
    std::vector<double> fs;
    for (int i = 0; i < 1024; ++i)
        fs.push_back(3.0 + std::exp(0.01 * i));
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(cv_lookup(cv5(), fs[i++ & 1023]));
}
BENCHMARK(BM_CvLookup);

void BM_ArConfidenceSet(benchmark::State& state)
{
    const SummaryStats s = SummaryStats::from_reported(0.8, 0.3, 2.5, -0.4);
    for (auto _ : state)
        benchmark::DoNotOptimize(ar_confidence_set(s, 0.95));
}
BENCHMARK(BM_ArConfidenceSet);

void BM_IvMoments(benchmark::State& state)
{
    DGPConfig cfg;
    cfg.n = state.range(0);
    cfg.f0 = 2.0;
    cfg.rho = 0.5;
    const ModelData d = draw_dataset(cfg, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(IvMoments::from(d).summary());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IvMoments)->Arg(1000)->Arg(10000);

void BM_PowerStudyBlock(benchmark::State& state)
{
    DGPConfig cfg;
    cfg.f0 = 2.0;
    cfg.rho = -0.5;
    const auto dev = default_deviation_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_power_study(cfg, dev, 1000, cv5(), 1));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PowerStudyBlock)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
