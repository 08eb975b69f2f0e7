#include "twomem/replay.hpp"

#include <stdexcept>

namespace twomem {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

bool ReplayBuffer::push(Transition t) {
    auto& ids = t.source == MemoryKind::EC ? ec_ids_ : rl_ids_;
    ids.push_back(base_id_ + storage_.size());
    storage_.push_back(std::move(t));
    if (storage_.size() <= capacity_) return false;

    storage_.pop_front();
    ++base_id_;
    if (!ec_ids_.empty() && ec_ids_.front() < base_id_) ec_ids_.pop_front();
    if (!rl_ids_.empty() && rl_ids_.front() < base_id_) rl_ids_.pop_front();
    return true;
}

std::vector<Transition> ReplayBuffer::sample_uniform(std::size_t n, Rng& rng,
                                                     std::optional<MemoryKind> source_filter) const {
    std::vector<Transition> batch;
    if (!source_filter) {
        if (storage_.empty()) return batch;
        batch.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            batch.push_back(storage_[rng.uniform_int(static_cast<std::uint32_t>(storage_.size()))]);
        }
        return batch;
    }
    const auto& ids = *source_filter == MemoryKind::EC ? ec_ids_ : rl_ids_;
    if (ids.empty()) return batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t id = ids[rng.uniform_int(static_cast<std::uint32_t>(ids.size()))];
        batch.push_back(storage_[static_cast<std::size_t>(id - base_id_)]);
    }
    return batch;
}

} // namespace twomem
