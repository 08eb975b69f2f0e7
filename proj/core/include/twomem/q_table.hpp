#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>

#include "twomem/env.hpp"
#include "twomem/replay.hpp"

namespace twomem {

// Tabular state-action value function trained by 1-step Q-learning from
// replay minibatches. Unvisited pairs read as 0.
class QTable {
public:
    QTable(std::uint32_t action_count, double alpha, double gamma);

    double value(std::uint32_t state_index, std::uint32_t action_index) const;

    // Applies the one-step update Q(s,a) += alpha * (target - Q(s,a)) to each
    // transition in order, with target = r for terminal transitions and
    // r + gamma * max_a' Q(s',a') otherwise. Returns the mean absolute
    // TD error over the batch.
    double td_update(std::span<const Transition> batch);

    // argmax_a Q(state, a); ties go to the lowest action index.
    ActionId greedy_action(const StateId& state) const;

    // Sum of Q over the environment's full state-action space.
    double q_sum(const Environment& env) const;

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    std::uint32_t action_count() const { return action_count_; }
    std::size_t stored_count() const { return values_.size(); }

    // Nonzero entries as "state action value" lines, sorted by (state, action).
    std::string snapshot() const;

private:
    static std::uint64_t key(std::uint32_t s, std::uint32_t a) {
        return (static_cast<std::uint64_t>(s) << 32) | a;
    }
    double max_value(std::uint32_t state_index) const;

    std::unordered_map<std::uint64_t, double> values_;
    std::uint32_t action_count_;
    double alpha_;
    double gamma_;
};

} // namespace twomem
