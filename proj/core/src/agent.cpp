#include "twomem/agent.hpp"

#include <limits>
#include <stdexcept>

namespace twomem {

const char* to_string(AgentMode mode) {
    switch (mode) {
    case AgentMode::two_memory: return "two_memory";
    case AgentMode::pure_ec: return "pure_ec";
    default: return "pure_rl";
    }
}

std::optional<AgentMode> parse_agent_mode(const std::string& text) {
    if (text == "two_memory") return AgentMode::two_memory;
    if (text == "pure_ec") return AgentMode::pure_ec;
    if (text == "pure_rl") return AgentMode::pure_rl;
    return std::nullopt;
}

void ScoreTracker::record(MemoryKind memory, double episode_return) {
    auto& window = windows_[slot(memory)];
    window.push_back(episode_return);
    if (window.size() > kWindow) window.pop_front();
    ++counts_[slot(memory)];
}

std::optional<double> ScoreTracker::score(MemoryKind memory) const {
    const auto& window = windows_[slot(memory)];
    if (window.empty()) return std::nullopt;
    double total = 0.0;
    for (double v : window) total += v;
    return total / static_cast<double>(window.size());
}

namespace {

FeatureExtractor make_extractor(const AgentConfig& config, const EnvSpec& env_spec) {
    if (config.ec_features == FeatureExtractor::Kind::identity) {
        return FeatureExtractor::identity();
    }
    // feature vectors per environment family: one-hot (state_count) or grid (2)
    const std::size_t input_dim =
        env_spec.name == "windy_grid" ? 2 : static_cast<std::size_t>(env_spec.state_count);
    return FeatureExtractor::random_projection(input_dim, config.ec_projection_dim,
                                               Rng::derive_seed(config.seed, 7));
}

} // namespace

TwoMemoryAgent::TwoMemoryAgent(const EnvSpec& env_spec, AgentConfig config)
    : config_(config),
      env_spec_(env_spec),
      gamma_(config.gamma.value_or(env_spec.discount_default)),
      ec_(env_spec.action_count, config.ec_capacity, config.ec_k,
          make_extractor(config, env_spec)),
      rl_(env_spec.action_count, config.alpha, gamma_),
      buffer_(config.replay_capacity),
      rng_(config.seed),
      eval_rng_(Rng::derive_seed(config.seed, 1)) {
    if (config_.epsilon < 0.0 || config_.epsilon > 1.0) {
        throw std::invalid_argument("epsilon must be in [0, 1]");
    }
    if (config_.train_every == 0) throw std::invalid_argument("train_every must be positive");
    if (config_.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
}

void TwoMemoryAgent::reseed_eval(std::uint64_t seed) { eval_rng_ = Rng(seed); }

MemoryKind TwoMemoryAgent::select_memory_for_episode() {
    switch (config_.mode) {
    case AgentMode::pure_ec: return MemoryKind::EC;
    case AgentMode::pure_rl: return MemoryKind::RL;
    case AgentMode::two_memory: break;
    }
    const double p_ec = config_.schedule.ec_probability(global_step_);
    return rng_.uniform01() < p_ec ? MemoryKind::EC : MemoryKind::RL;
}

ActionId TwoMemoryAgent::act_with(MemoryKind memory, const StateId& state, double epsilon,
                                  Rng& rng) {
    if (epsilon > 0.0 && rng.uniform01() < epsilon) {
        return ActionId{rng.uniform_int(env_spec_.action_count)};
    }
    return memory == MemoryKind::EC ? ec_.select_action(state, rng) : rl_.greedy_action(state);
}

ActionId TwoMemoryAgent::act(MemoryKind memory, const StateId& state) {
    return act_with(memory, state, config_.epsilon, rng_);
}

void TwoMemoryAgent::train_step_if_due() {
    if (config_.mode == AgentMode::pure_ec) return;
    if (global_step_ % config_.train_every != 0) return;
    const std::optional<MemoryKind> filter =
        config_.data_sharing ? std::nullopt : std::optional<MemoryKind>(MemoryKind::RL);
    const auto batch = buffer_.sample_uniform(config_.batch_size, rng_, filter);
    if (batch.empty()) return;
    if (on_td_batch) on_td_batch(batch);
    rl_.td_update(batch);
}

EpisodeOutcome TwoMemoryAgent::run_training_episode(Environment& env) {
    const MemoryKind memory = select_memory_for_episode();
    std::vector<Transition> trajectory;
    StateId state = env.reset(rng_);
    double episode_return = 0.0;
    std::uint32_t steps = 0;

    while (true) {
        const ActionId action = act_with(memory, state, config_.epsilon, rng_);
        const StepResult result = env.step(action, rng_);
        const Transition transition{state, action, result.reward, result.next_state,
                                    result.terminal, memory};
        buffer_.push(transition);
        trajectory.push_back(transition);
        episode_return += result.reward;
        ++steps;
        ++global_step_;
        train_step_if_due();
        state = result.next_state;
        if (result.terminal) break;
    }

    const bool update_ec = config_.mode != AgentMode::pure_rl &&
                           (config_.data_sharing || memory == MemoryKind::EC);
    if (update_ec) {
        if (env.truncated()) {
            ec_.fold_truncated(trajectory, -static_cast<double>(env.spec().max_episode_steps));
        } else {
            ec_.update_from_episode(trajectory, gamma_);
        }
    }
    tracker_.record(memory, episode_return);
    return EpisodeOutcome{episode_return, memory, steps};
}

MemoryKind eval_memory_choice(std::optional<double> score_rl, std::optional<double> score_ec) {
    if (!score_rl && !score_ec) return MemoryKind::EC;
    constexpr double kMissing = -std::numeric_limits<double>::infinity();
    return score_rl.value_or(kMissing) >= score_ec.value_or(kMissing) ? MemoryKind::RL
                                                                      : MemoryKind::EC;
}

MemoryKind TwoMemoryAgent::select_memory_for_eval() const {
    return eval_memory_choice(tracker_.score(MemoryKind::RL), tracker_.score(MemoryKind::EC));
}

EvalOutcome TwoMemoryAgent::run_eval_episode(Environment& env) {
    const MemoryKind memory = select_memory_for_eval();
    StateId state = env.reset(eval_rng_);
    double eval_return = 0.0;
    while (true) {
        const ActionId action = act_with(memory, state, 0.0, eval_rng_);
        const StepResult result = env.step(action, eval_rng_);
        eval_return += result.reward;
        state = result.next_state;
        if (result.terminal) break;
    }
    return EvalOutcome{eval_return, memory};
}

} // namespace twomem
