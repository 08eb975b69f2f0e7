#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "twomem/env.hpp"
#include "twomem/rng.hpp"

namespace twomem {

// Which memory drove the episode a transition was collected in.
enum class MemoryKind { EC, RL };

inline const char* to_string(MemoryKind kind) {
    return kind == MemoryKind::EC ? "ec" : "rl";
}

struct Transition {
    StateId state;
    ActionId action;
    double reward = 0.0;
    StateId next_state;
    bool terminal = false;
    MemoryKind source = MemoryKind::RL;
};

// Bounded FIFO of transitions with uniform with-replacement sampling.
// An optional source filter restricts sampling to transitions collected by
// one memory, which is how the data-sharing-off ablation is realized.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    // Appends a transition; returns true if the oldest one was dropped.
    bool push(Transition t);

    // n i.i.d. uniform draws from the eligible population. An empty eligible
    // population yields an empty batch (the caller skips its training step).
    std::vector<Transition> sample_uniform(std::size_t n, Rng& rng,
                                           std::optional<MemoryKind> source_filter = {}) const;

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t count(MemoryKind source) const {
        return (source == MemoryKind::EC ? ec_ids_ : rl_ids_).size();
    }

    // Oldest-first access.
    const Transition& at(std::size_t i) const { return storage_[i]; }

private:
    std::size_t capacity_;
    std::uint64_t base_id_ = 0; // id of storage_.front()
    std::deque<Transition> storage_;
    std::deque<std::uint64_t> ec_ids_, rl_ids_;
};

} // namespace twomem
