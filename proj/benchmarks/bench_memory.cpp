#include <benchmark/benchmark.h>

#include "twomem/episodic_memory.hpp"
#include "twomem/q_table.hpp"
#include "twomem/replay.hpp"
#include "twomem/rng.hpp"

using namespace twomem;

namespace {

Transition random_transition(Rng& rng, std::uint32_t states, std::uint32_t actions) {
    Transition t;
    t.state.index = rng.uniform_int(states);
    t.state.features = {static_cast<double>(t.state.index % 10) / 9.0,
                        static_cast<double>(t.state.index / 10) / 9.0};
    t.action.index = rng.uniform_int(actions);
    t.reward = rng.uniform01() * 2 - 1;
    t.next_state.index = rng.uniform_int(states);
    t.next_state.features = t.state.features;
    t.terminal = rng.uniform01() < 0.1;
    t.source = rng.uniform01() < 0.5 ? MemoryKind::EC : MemoryKind::RL;
    return t;
}

} // namespace

static void BM_EpisodicUpdate(benchmark::State& state) {
    Rng rng(1);
    EpisodicMemory memory(4, 100000, 3);
    std::vector<Transition> episode;
    for (int i = 0; i < 50; ++i) episode.push_back(random_transition(rng, state.range(0), 4));
    episode.back().terminal = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(memory.update_from_episode(episode, 1.0));
    }
}
BENCHMARK(BM_EpisodicUpdate)->Arg(70)->Arg(1000);

static void BM_EpisodicEstimateKnn(benchmark::State& state) {
    Rng rng(2);
    EpisodicMemory memory(4, 100000, 3);
    for (int episode = 0; episode < state.range(0) / 10; ++episode) {
        std::vector<Transition> trajectory;
        for (int i = 0; i < 10; ++i) trajectory.push_back(random_transition(rng, state.range(0), 4));
        trajectory.back().terminal = true;
        memory.update_from_episode(trajectory, 1.0);
    }
    StateId query;
    query.index = 999999;
    query.features = {0.123, 0.456}; // never stored: forces the neighbour scan
    for (auto _ : state) {
        benchmark::DoNotOptimize(memory.estimate(query, ActionId{0}));
    }
}
BENCHMARK(BM_EpisodicEstimateKnn)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_ReplayPush(benchmark::State& state) {
    Rng rng(3);
    ReplayBuffer buffer(100000);
    const Transition t = random_transition(rng, 70, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(buffer.push(t));
    }
}
BENCHMARK(BM_ReplayPush);

static void BM_ReplaySample(benchmark::State& state) {
    Rng rng(4);
    ReplayBuffer buffer(100000);
    for (int i = 0; i < 50000; ++i) buffer.push(random_transition(rng, 70, 4));
    const bool filtered = state.range(0) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(buffer.sample_uniform(
            32, rng, filtered ? std::optional(MemoryKind::EC) : std::nullopt));
    }
}
BENCHMARK(BM_ReplaySample)->Arg(0)->Arg(1);

static void BM_TdUpdateBatch(benchmark::State& state) {
    Rng rng(5);
    QTable q(4, 0.1, 1.0);
    std::vector<Transition> batch;
    for (int i = 0; i < 32; ++i) batch.push_back(random_transition(rng, 70, 4));
    for (auto _ : state) {
        benchmark::DoNotOptimize(q.td_update(batch));
    }
}
BENCHMARK(BM_TdUpdateBatch);
