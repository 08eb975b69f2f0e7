#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twomem/env.hpp"
#include "twomem/replay.hpp"
#include "twomem/rng.hpp"

namespace twomem {

// Maps raw state features into the space used for nearest-neighbour search.
// Either the identity, or a fixed random Gaussian projection sampled once
// from a seeded generator.
class FeatureExtractor {
public:
    enum class Kind { identity, random_projection };

    static FeatureExtractor identity() { return FeatureExtractor{}; }
    static FeatureExtractor random_projection(std::size_t input_dim, std::size_t output_dim,
                                              std::uint64_t seed);

    std::vector<double> apply(const std::vector<double>& features) const;
    Kind kind() const { return matrix_.empty() ? Kind::identity : Kind::random_projection; }
    std::size_t output_dim() const { return matrix_.size(); }

private:
    FeatureExtractor() = default;
    std::vector<std::vector<double>> matrix_; // empty means identity
};

struct ECEntry {
    double best_return = 0.0;          // highest episodic return seen
    std::uint64_t last_update_tick = 0; // global write counter at last touch
    std::uint64_t insert_seq = 0;       // eviction tie-break
};

// Non-parametric control memory: a capacity-bounded table from
// (state key, action) to the best episodic return observed, with k-nearest-
// neighbour estimation for missing entries and least-recently-updated
// eviction. State keys are extracted feature vectors compared bit-exactly,
// which collapses to discrete state identity for tabular environments.
class EpisodicMemory {
public:
    EpisodicMemory(std::uint32_t action_count, std::size_t capacity, std::size_t k,
                   FeatureExtractor extractor = FeatureExtractor::identity());

    // Folds one complete episode into the table: computes the episodic return
    // G_t backward in a single pass, inserts or max-merges each (s_t, a_t),
    // bumps update ticks, and evicts while over capacity. Returns the number
    // of entries inserted or raised.
    std::size_t update_from_episode(std::span<const Transition> trajectory, double discount);

    // Step-cap truncations have no Monte-Carlo return. Scoring their visited
    // pairs verbatim would make unfinished wandering look like progress, so
    // they are max-merged at a flat pessimistic floor instead.
    std::size_t fold_truncated(std::span<const Transition> trajectory, double floor_value);

    // Stored value on an exact key hit; otherwise the mean best_return of the
    // k nearest stored keys (Euclidean distance in feature space) holding an
    // entry for this action, or fewer if fewer exist. Empty when no entry for
    // this action exists anywhere.
    std::optional<double> estimate(const StateId& state, ActionId action) const;

    // argmax of estimate() across actions; actions with no estimate lose
    // against any estimated one; ties break to the lowest index. Falls back
    // to a uniformly random action when nothing is estimable.
    ActionId select_action(const StateId& state, Rng& rng) const;

    // Drops the least-recently-updated entry while over capacity; returns the
    // last evicted (state key, action), if any.
    std::optional<std::pair<std::vector<double>, ActionId>> evict_if_full();

    std::optional<ECEntry> entry(const StateId& state, ActionId action) const;
    std::size_t size() const { return entry_count_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t k() const { return k_; }
    std::uint64_t tick() const { return tick_; }
    const FeatureExtractor& extractor() const { return extractor_; }

    // Text dump, one "feature... action best_return tick" line per entry in
    // key insertion order.
    std::string snapshot() const;

private:
    struct Slot {
        std::vector<double> features;
        std::vector<std::optional<ECEntry>> entries; // indexed by action
    };

    static std::string key_bytes(const std::vector<double>& features);
    Slot* find_slot(const std::vector<double>& features);
    const Slot* find_slot(const std::vector<double>& features) const;
    void remove_entry(std::size_t slot_index, std::uint32_t action);
    std::size_t merge_returns(std::span<const Transition> trajectory,
                              std::span<const double> returns);

    std::uint32_t action_count_;
    std::size_t capacity_;
    std::size_t k_;
    FeatureExtractor extractor_;

    std::vector<Slot> slots_; // insertion order of keys
    std::unordered_map<std::string, std::size_t> index_; // key bytes -> slot
    std::size_t entry_count_ = 0;
    std::uint64_t tick_ = 0;
    std::uint64_t insert_seq_ = 0;
};

} // namespace twomem
