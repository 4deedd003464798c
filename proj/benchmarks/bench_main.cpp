#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "urllc/channel.hpp"
#include "urllc/engine.hpp"
#include "urllc/link_adapt.hpp"
#include "urllc/scheduler.hpp"
#include "urllc/sliding_max.hpp"

using namespace urllc;

static void BM_SlidingMaxPush(benchmark::State& state) {
    la::SlidingWindowMax<int> w(static_cast<std::size_t>(state.range(0)));
    std::mt19937 rng(1);
    std::vector<int> values(4096);
    for (int& v : values) v = static_cast<int>(rng() % 31) - 15;
    std::size_t i = 0;
    for (auto _ : state) {
        w.push(values[i++ & 4095]);
        benchmark::DoNotOptimize(w.max());
    }
}
BENCHMARK(BM_SlidingMaxPush)->Arg(10)->Arg(100)->Arg(1000);

static void BM_CqiHistoryReport(benchmark::State& state) {
    const la::TimingConfig timing;
    la::CqiHistory h(timing, 13, 100);
    std::mt19937 rng(2);
    std::vector<int> cqi(13, 8);
    long long n = 0;
    for (auto _ : state) {
        for (int& c : cqi) c = static_cast<int>(rng() % 16);
        const SimTime at = timing.cqi_period * n++;
        h.on_report({at, at + timing.cqi_delay, cqi});
    }
}
BENCHMARK(BM_CqiHistoryReport);

static void BM_MaxTbSubset(benchmark::State& state) {
    const phy::McsTable table = phy::McsTable::bundled();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> snr(-5, 25);
    std::vector<sched::RbQuality> rbs(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < rbs.size(); ++i) rbs[i] = {static_cast<int>(i), snr(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(sched::max_tb_subset(rbs, 0.1, table));
}
BENCHMARK(BM_MaxTbSubset)->Arg(12)->Arg(100);

static void BM_SnrPerRb(benchmark::State& state) {
    const channel::GridConfig grid;
    const auto process = channel::make_process(channel::bundled_profile(channel::ProfileKind::Eva), 111.0, 1);
    const channel::RbSnrMap map(process, grid);
    std::vector<double> out(static_cast<std::size_t>(map.num_rbs()));
    double t = 0;
    for (auto _ : state) {
        map.snr_db(t, 10.0, out);
        t += 1.428e-4;
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_SnrPerRb);

static void BM_EngineOneSecond(benchmark::State& state) {
    SimConfig c;
    c.duration_s = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(engine::run(c));
}
BENCHMARK(BM_EngineOneSecond)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
