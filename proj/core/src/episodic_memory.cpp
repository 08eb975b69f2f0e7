#include "twomem/episodic_memory.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace twomem {

FeatureExtractor FeatureExtractor::random_projection(std::size_t input_dim,
                                                     std::size_t output_dim,
                                                     std::uint64_t seed) {
    if (input_dim == 0 || output_dim == 0) {
        throw std::invalid_argument("random projection dimensions must be positive");
    }
    FeatureExtractor fe;
    Rng rng(seed);
    fe.matrix_.resize(output_dim);
    for (auto& row : fe.matrix_) {
        row.resize(input_dim);
        for (double& v : row) v = rng.normal();
    }
    return fe;
}

std::vector<double> FeatureExtractor::apply(const std::vector<double>& features) const {
    if (matrix_.empty()) return features;
    std::vector<double> out(matrix_.size(), 0.0);
    for (std::size_t r = 0; r < matrix_.size(); ++r) {
        const auto& row = matrix_[r];
        if (row.size() != features.size()) {
            throw std::invalid_argument("feature dimension does not match projection");
        }
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * features[c];
        out[r] = acc;
    }
    return out;
}

EpisodicMemory::EpisodicMemory(std::uint32_t action_count, std::size_t capacity, std::size_t k,
                               FeatureExtractor extractor)
    : action_count_(action_count), capacity_(capacity), k_(k), extractor_(std::move(extractor)) {
    if (action_count == 0) throw std::invalid_argument("action_count must be positive");
    if (capacity == 0) throw std::invalid_argument("capacity must be positive");
    if (k == 0) throw std::invalid_argument("k must be positive");
}

std::string EpisodicMemory::key_bytes(const std::vector<double>& features) {
    std::string bytes(features.size() * sizeof(double), '\0');
    if (!features.empty()) {
        std::memcpy(bytes.data(), features.data(), bytes.size());
    }
    return bytes;
}

EpisodicMemory::Slot* EpisodicMemory::find_slot(const std::vector<double>& features) {
    const auto it = index_.find(key_bytes(features));
    return it == index_.end() ? nullptr : &slots_[it->second];
}

const EpisodicMemory::Slot* EpisodicMemory::find_slot(const std::vector<double>& features) const {
    const auto it = index_.find(key_bytes(features));
    return it == index_.end() ? nullptr : &slots_[it->second];
}

std::size_t EpisodicMemory::update_from_episode(std::span<const Transition> trajectory,
                                                double discount) {
    if (trajectory.empty()) throw std::invalid_argument("update_from_episode: empty trajectory");
    if (discount <= 0.0 || discount > 1.0) {
        throw std::invalid_argument("discount must be in (0, 1]");
    }

    // episodic returns, backward in one pass
    std::vector<double> returns(trajectory.size());
    double g = 0.0;
    for (std::size_t i = trajectory.size(); i-- > 0;) {
        g = trajectory[i].reward + discount * g;
        returns[i] = g;
    }
    return merge_returns(trajectory, returns);
}

std::size_t EpisodicMemory::fold_truncated(std::span<const Transition> trajectory,
                                           double floor_value) {
    if (trajectory.empty()) throw std::invalid_argument("fold_truncated: empty trajectory");
    const std::vector<double> returns(trajectory.size(), floor_value);
    return merge_returns(trajectory, returns);
}

std::size_t EpisodicMemory::merge_returns(std::span<const Transition> trajectory,
                                          std::span<const double> returns) {
    std::size_t changed = 0;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const Transition& t = trajectory[i];
        const std::vector<double> key = extractor_.apply(t.state.features);
        Slot* slot = find_slot(key);
        if (slot == nullptr) {
            index_.emplace(key_bytes(key), slots_.size());
            slots_.push_back(Slot{key, std::vector<std::optional<ECEntry>>(action_count_)});
            slot = &slots_.back();
        }
        auto& entry = slot->entries[t.action.index];
        if (!entry) {
            entry = ECEntry{returns[i], tick_++, insert_seq_++};
            ++entry_count_;
            ++changed;
            evict_if_full();
        } else {
            entry->last_update_tick = tick_++;
            if (returns[i] > entry->best_return) {
                entry->best_return = returns[i];
                ++changed;
            }
        }
    }
    return changed;
}

void EpisodicMemory::remove_entry(std::size_t slot_index, std::uint32_t action) {
    Slot& slot = slots_[slot_index];
    slot.entries[action].reset();
    --entry_count_;
    const bool empty = std::none_of(slot.entries.begin(), slot.entries.end(),
                                    [](const auto& e) { return e.has_value(); });
    if (!empty) return;
    index_.erase(key_bytes(slot.features));
    slots_.erase(slots_.begin() + static_cast<std::ptrdiff_t>(slot_index));
    for (auto& [bytes, idx] : index_) {
        if (idx > slot_index) --idx;
    }
}

std::optional<std::pair<std::vector<double>, ActionId>> EpisodicMemory::evict_if_full() {
    std::optional<std::pair<std::vector<double>, ActionId>> evicted;
    while (entry_count_ > capacity_) {
        std::size_t victim_slot = 0;
        std::uint32_t victim_action = 0;
        std::uint64_t best_tick = std::numeric_limits<std::uint64_t>::max();
        std::uint64_t best_seq = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            for (std::uint32_t a = 0; a < action_count_; ++a) {
                const auto& entry = slots_[s].entries[a];
                if (!entry) continue;
                if (entry->last_update_tick < best_tick ||
                    (entry->last_update_tick == best_tick && entry->insert_seq < best_seq)) {
                    best_tick = entry->last_update_tick;
                    best_seq = entry->insert_seq;
                    victim_slot = s;
                    victim_action = a;
                }
            }
        }
        evicted = std::make_pair(slots_[victim_slot].features, ActionId{victim_action});
        remove_entry(victim_slot, victim_action);
    }
    return evicted;
}

std::optional<ECEntry> EpisodicMemory::entry(const StateId& state, ActionId action) const {
    const Slot* slot = find_slot(extractor_.apply(state.features));
    if (slot == nullptr || !slot->entries[action.index]) return std::nullopt;
    return slot->entries[action.index];
}

std::optional<double> EpisodicMemory::estimate(const StateId& state, ActionId action) const {
    const std::vector<double> key = extractor_.apply(state.features);
    if (const Slot* slot = find_slot(key); slot != nullptr && slot->entries[action.index]) {
        return slot->entries[action.index]->best_return;
    }

    // k nearest stored keys that hold an entry for this action
    std::vector<std::pair<double, std::size_t>> candidates; // (squared distance, slot order)
    for (std::size_t s = 0; s < slots_.size(); ++s) {
        const Slot& slot = slots_[s];
        if (!slot.entries[action.index]) continue;
        double dist = 0.0;
        for (std::size_t d = 0; d < key.size(); ++d) {
            const double diff = key[d] - slot.features[d];
            dist += diff * diff;
        }
        candidates.emplace_back(dist, s);
    }
    if (candidates.empty()) return std::nullopt;

    const std::size_t use = std::min(k_, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(use),
                      candidates.end());
    double total = 0.0;
    for (std::size_t i = 0; i < use; ++i) {
        total += slots_[candidates[i].second].entries[action.index]->best_return;
    }
    return total / static_cast<double>(use);
}

ActionId EpisodicMemory::select_action(const StateId& state, Rng& rng) const {
    std::uint32_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::uint32_t a = 0; a < action_count_; ++a) {
        const auto value = estimate(state, ActionId{a});
        if (!value) continue;
        if (!any || *value > best_value) {
            best = a;
            best_value = *value;
            any = true;
        }
    }
    if (!any) return ActionId{rng.uniform_int(action_count_)};
    return ActionId{best};
}

std::string EpisodicMemory::snapshot() const {
    std::ostringstream out;
    for (const Slot& slot : slots_) {
        for (std::uint32_t a = 0; a < action_count_; ++a) {
            if (!slot.entries[a]) continue;
            for (double f : slot.features) out << f << ' ';
            out << a << ' ' << slot.entries[a]->best_return << ' '
                << slot.entries[a]->last_update_tick << '\n';
        }
    }
    return out.str();
}

} // namespace twomem
