#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "twomem/rng.hpp"

namespace twomem {

// A state of a tabular environment. `features` is the embedding used for
// nearest-neighbour lookups in the episodic memory: normalized (row, col)
// for grids, a one-hot vector for tree/tabular MDPs.
struct StateId {
    std::uint32_t index = 0;
    std::vector<double> features;

    bool operator==(const StateId& other) const {
        return index == other.index && features == other.features;
    }
};

struct ActionId {
    std::uint32_t index = 0;

    bool operator==(const ActionId& other) const { return index == other.index; }
};

struct StepResult {
    StateId next_state;
    double reward = 0.0;
    bool terminal = false;
};

struct EnvSpec {
    std::string name;
    std::uint32_t state_count = 0;
    std::uint32_t action_count = 0;
    std::uint32_t max_episode_steps = 1;
    double discount_default = 1.0;
};

// Episodic tabular MDP. An instance is single-threaded; separate instances
// share no state. Stepping a terminated (or never reset) environment throws.
class Environment {
public:
    virtual ~Environment() = default;

    const EnvSpec& spec() const { return spec_; }

    StateId reset(Rng& rng);
    StepResult step(ActionId action, Rng& rng);

    // State lookup by index (environments here are fully enumerable).
    virtual StateId state(std::uint32_t index) const = 0;

    bool done() const { return done_; }
    // True when the episode ended by hitting the step cap rather than an
    // absorbing state. Such episodes have no complete Monte-Carlo return.
    bool truncated() const { return truncated_; }
    std::uint32_t steps_taken() const { return steps_taken_; }

protected:
    explicit Environment(EnvSpec spec) : spec_(std::move(spec)) {}

    virtual std::uint32_t reset_impl(Rng& rng) = 0;
    // Returns (next state index, reward, absorbing).
    struct RawStep {
        std::uint32_t next_index;
        double reward;
        bool absorbing;
    };
    virtual RawStep step_impl(std::uint32_t state_index, std::uint32_t action, Rng& rng) = 0;

private:
    EnvSpec spec_;
    std::uint32_t current_ = 0;
    std::uint32_t steps_taken_ = 0;
    bool done_ = true; // requires reset before first step
    bool truncated_ = false;
};

// Every (state, action) pair exactly once, in (state, action) ascending order.
std::vector<std::pair<StateId, ActionId>> enumerate_state_actions(const Environment& env);

// Seven-state binary tree with one stochastic leaf branch. The root has two
// children; the left child's second action splits 50/50 between a -10 and a
// +20 leaf, so its best-seen return (20) is far above its expected value (5).
class MotivatingTree final : public Environment {
public:
    MotivatingTree();
    StateId state(std::uint32_t index) const override;

protected:
    std::uint32_t reset_impl(Rng& rng) override;
    RawStep step_impl(std::uint32_t state_index, std::uint32_t action, Rng& rng) override;
};

// 7x10 grid, start (3,0), goal (3,7). Column 6 carries a stochastic upward
// wind (one extra row up with p=0.8, two rows with p=0.1, none with p=0.1)
// applied to any move leaving a cell in that column. Crossing along the start
// row is the short route: it usually lands one row above the goal (cheap
// recovery), occasionally directly on it, and with the two-row gust on the
// trap at (1,7), a penalty cell that makes the shortcut worse in expectation
// than crossing one row lower. A memory that keeps best-seen returns commits
// to the shortcut; expected-value learners go around. Rewards: -1 per step,
// -40 for stepping onto the trap, 0 on reaching the goal; only the goal is
// absorbing. Episodes cap at 200 steps. Actions are indexed clockwise from
// east: right, down, left, up.
class WindyGrid final : public Environment {
public:
    static constexpr int kRows = 7;
    static constexpr int kCols = 10;
    static constexpr int kWindColumn = 6;
    static constexpr int kStartRow = 3, kStartCol = 0;
    static constexpr int kGoalRow = 3, kGoalCol = 7;
    static constexpr int kTrapRow = 1, kTrapCol = 7;
    static constexpr double kTrapPenalty = -40.0;

    WindyGrid();
    StateId state(std::uint32_t index) const override;

    static std::uint32_t cell_index(int row, int col) {
        return static_cast<std::uint32_t>(row * kCols + col);
    }

protected:
    std::uint32_t reset_impl(Rng& rng) override;
    RawStep step_impl(std::uint32_t state_index, std::uint32_t action, Rng& rng) override;
};

// Tabular MDP loaded from a transition-table text file; see docs in README.
// Header lines set states/actions/start/max_episode_steps/discount, then one
// line per transition: state action next_state probability reward terminal.
class GenericTabularMDP final : public Environment {
public:
    struct Row {
        std::uint32_t state, action, next_state;
        double probability, reward;
        bool terminal;
    };

    GenericTabularMDP(EnvSpec spec, std::uint32_t start_state, std::vector<Row> rows);

    static std::unique_ptr<GenericTabularMDP> load(const std::string& path);
    static std::unique_ptr<GenericTabularMDP> parse(const std::string& text,
                                                    const std::string& origin);

    StateId state(std::uint32_t index) const override;
    const std::vector<Row>& rows() const { return rows_; }
    std::uint32_t start_state() const { return start_; }

protected:
    std::uint32_t reset_impl(Rng& rng) override;
    RawStep step_impl(std::uint32_t state_index, std::uint32_t action, Rng& rng) override;

private:
    std::uint32_t start_;
    std::vector<Row> rows_;
    // per (state, action): indices into rows_, in file order
    std::vector<std::vector<std::uint32_t>> by_pair_;
};

// Environments selectable by name in the harness config: "motivating_tree",
// "windy_grid", or "tabular" (requires a file path).
std::unique_ptr<Environment> make_env(const std::string& name, const std::string& file = {});

} // namespace twomem
