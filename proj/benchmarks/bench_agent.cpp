#include <benchmark/benchmark.h>

#include "twomem/agent.hpp"
#include "twomem/env.hpp"

using namespace twomem;

static void BM_WindyGridStep(benchmark::State& state) {
    WindyGrid env;
    Rng rng(1);
    env.reset(rng);
    for (auto _ : state) {
        const StepResult r = env.step(ActionId{rng.uniform_int(4)}, rng);
        benchmark::DoNotOptimize(r.reward);
        if (r.terminal) env.reset(rng);
    }
}
BENCHMARK(BM_WindyGridStep);

static void BM_TrainingEpisode(benchmark::State& state) {
    WindyGrid env;
    AgentConfig config;
    config.mode = static_cast<AgentMode>(state.range(0));
    config.seed = 11;
    TwoMemoryAgent agent(env.spec(), config);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agent.run_training_episode(env));
    }
    state.SetLabel(to_string(config.mode));
}
BENCHMARK(BM_TrainingEpisode)->Arg(0)->Arg(1)->Arg(2);

static void BM_EvalEpisode(benchmark::State& state) {
    WindyGrid env, eval_env;
    AgentConfig config;
    config.seed = 13;
    TwoMemoryAgent agent(env.spec(), config);
    for (int i = 0; i < 100; ++i) agent.run_training_episode(env);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agent.run_eval_episode(eval_env));
    }
}
BENCHMARK(BM_EvalEpisode);
