#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "twomem/env.hpp"
#include "twomem/episodic_memory.hpp"
#include "twomem/q_table.hpp"
#include "twomem/replay.hpp"
#include "twomem/rng.hpp"
#include "twomem/schedule.hpp"

namespace twomem {

enum class AgentMode { two_memory, pure_ec, pure_rl };

const char* to_string(AgentMode mode);
std::optional<AgentMode> parse_agent_mode(const std::string& text);

// Rolling mean of the last `kWindow` training-episode returns per memory,
// used to pick the memory for evaluation.
class ScoreTracker {
public:
    static constexpr std::size_t kWindow = 50;

    void record(MemoryKind memory, double episode_return);
    std::optional<double> score(MemoryKind memory) const; // empty window -> nullopt
    std::size_t count(MemoryKind memory) const { return counts_[slot(memory)]; }
    const std::deque<double>& window(MemoryKind memory) const { return windows_[slot(memory)]; }

private:
    static std::size_t slot(MemoryKind memory) { return memory == MemoryKind::EC ? 0 : 1; }
    std::deque<double> windows_[2];
    std::size_t counts_[2] = {0, 0};
};

struct AgentConfig {
    AgentMode mode = AgentMode::two_memory;
    double epsilon = 0.1;
    std::uint32_t train_every = 10;
    std::uint32_t batch_size = 16;
    Schedule schedule{};
    bool data_sharing = true;
    std::uint64_t seed = 1;

    // learner settings
    double alpha = 0.1;
    std::optional<double> gamma; // defaults to the environment's discount

    // memory settings
    std::size_t replay_capacity = 100000;
    std::size_t ec_capacity = 100000;
    std::size_t ec_k = 3;
    FeatureExtractor::Kind ec_features = FeatureExtractor::Kind::identity;
    std::size_t ec_projection_dim = 4;
};

struct EpisodeOutcome {
    double episode_return = 0.0; // undiscounted
    MemoryKind memory_used = MemoryKind::EC;
    std::uint32_t steps = 0;
};

struct EvalOutcome {
    double eval_return = 0.0;
    MemoryKind memory_used = MemoryKind::EC;
};

// The evaluation switch: RL wins when its recent score is at least the EC
// score, with an empty window counting as negative infinity; when both are
// empty the EC memory is used.
MemoryKind eval_memory_choice(std::optional<double> score_rl, std::optional<double> score_ec);

// The two-memory agent: picks one memory per training episode, acts
// epsilon-greedily with it, routes all experience into a shared replay buffer
// and the episodic table, trains the Q-learner on a fixed step cadence, and
// evaluates greedily with whichever memory scored better recently. The pure
// modes disable the other memory's learning and act as baselines.
class TwoMemoryAgent {
public:
    TwoMemoryAgent(const EnvSpec& env_spec, AgentConfig config);

    MemoryKind select_memory_for_episode();
    ActionId act(MemoryKind memory, const StateId& state); // training policy
    EpisodeOutcome run_training_episode(Environment& env);

    MemoryKind select_memory_for_eval() const;
    EvalOutcome run_eval_episode(Environment& env);

    // Evaluation randomness is an independent stream; the harness reseeds it
    // per checkpoint so paired runs see common draws.
    void reseed_eval(std::uint64_t seed);

    double ec_probability_now() const { return config_.schedule.ec_probability(global_step_); }

    const EpisodicMemory& ec() const { return ec_; }
    const QTable& rl() const { return rl_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    const ScoreTracker& tracker() const { return tracker_; }
    const AgentConfig& config() const { return config_; }
    std::uint64_t global_step() const { return global_step_; }
    double gamma() const { return gamma_; }

    // Test hook: observes every minibatch handed to the Q-learner.
    std::function<void(std::span<const Transition>)> on_td_batch;

private:
    ActionId act_with(MemoryKind memory, const StateId& state, double epsilon, Rng& rng);
    void train_step_if_due();

    AgentConfig config_;
    EnvSpec env_spec_;
    double gamma_;
    EpisodicMemory ec_;
    QTable rl_;
    ReplayBuffer buffer_;
    ScoreTracker tracker_;
    std::uint64_t global_step_ = 0;
    Rng rng_;
    Rng eval_rng_;
};

} // namespace twomem
