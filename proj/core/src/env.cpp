#include "twomem/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twomem {

StateId Environment::reset(Rng& rng) {
    current_ = reset_impl(rng);
    steps_taken_ = 0;
    done_ = false;
    truncated_ = false;
    return state(current_);
}

StepResult Environment::step(ActionId action, Rng& rng) {
    if (done_) {
        throw std::logic_error("step() on a terminated environment (" + spec_.name +
                               "); call reset() first");
    }
    if (action.index >= spec_.action_count) {
        throw std::logic_error("action index " + std::to_string(action.index) +
                               " out of range for " + spec_.name);
    }
    const RawStep raw = step_impl(current_, action.index, rng);
    ++steps_taken_;
    current_ = raw.next_index;
    done_ = raw.absorbing || steps_taken_ >= spec_.max_episode_steps;
    truncated_ = done_ && !raw.absorbing;
    return StepResult{state(current_), raw.reward, done_};
}

std::vector<std::pair<StateId, ActionId>> enumerate_state_actions(const Environment& env) {
    std::vector<std::pair<StateId, ActionId>> pairs;
    pairs.reserve(static_cast<std::size_t>(env.spec().state_count) * env.spec().action_count);
    for (std::uint32_t s = 0; s < env.spec().state_count; ++s) {
        for (std::uint32_t a = 0; a < env.spec().action_count; ++a) {
            pairs.emplace_back(env.state(s), ActionId{a});
        }
    }
    return pairs;
}

namespace {

std::vector<double> one_hot(std::uint32_t index, std::uint32_t size) {
    std::vector<double> f(size, 0.0);
    f[index] = 1.0;
    return f;
}

} // namespace

// ---------------------------------------------------------------------------
// MotivatingTree
// ---------------------------------------------------------------------------
//
// Indices: 0..6 for s1..s7. Actions: 0 = left, 1 = right.
//   s1 -a1-> s2, s1 -a2-> s3 (reward 0)
//   s2 -a1-> s4 (+10), s2 -a2-> s5 (-10) or s6 (+20), 50/50
//   s3 -either-> s7 (-20)
// Leaves s4..s7 are absorbing.

MotivatingTree::MotivatingTree()
    : Environment(EnvSpec{"motivating_tree", 7, 2, 10, 1.0}) {}

StateId MotivatingTree::state(std::uint32_t index) const {
    return StateId{index, one_hot(index, 7)};
}

std::uint32_t MotivatingTree::reset_impl(Rng&) { return 0; }

Environment::RawStep MotivatingTree::step_impl(std::uint32_t s, std::uint32_t a, Rng& rng) {
    switch (s) {
    case 0:
        return a == 0 ? RawStep{1, 0.0, false} : RawStep{2, 0.0, false};
    case 1:
        if (a == 0) return RawStep{3, 10.0, true};
        return rng.uniform01() < 0.5 ? RawStep{4, -10.0, true} : RawStep{5, 20.0, true};
    case 2:
        return RawStep{6, -20.0, true};
    default:
        throw std::logic_error("motivating_tree: step from a leaf state");
    }
}

// ---------------------------------------------------------------------------
// WindyGrid
// ---------------------------------------------------------------------------

WindyGrid::WindyGrid()
    : Environment(EnvSpec{"windy_grid", kRows * kCols, 4, 200, 1.0}) {}

StateId WindyGrid::state(std::uint32_t index) const {
    const int row = static_cast<int>(index) / kCols;
    const int col = static_cast<int>(index) % kCols;
    return StateId{index,
                   {static_cast<double>(row) / (kRows - 1),
                    static_cast<double>(col) / (kCols - 1)}};
}

std::uint32_t WindyGrid::reset_impl(Rng&) { return cell_index(kStartRow, kStartCol); }

Environment::RawStep WindyGrid::step_impl(std::uint32_t s, std::uint32_t a, Rng& rng) {
    static constexpr int kDRow[4] = {0, +1, 0, -1}; // clockwise from east: right, down, left, up
    static constexpr int kDCol[4] = {+1, 0, -1, 0};

    const int row = static_cast<int>(s) / kCols;
    const int col = static_cast<int>(s) % kCols;

    int next_row = std::clamp(row + kDRow[a], 0, kRows - 1);
    int next_col = std::clamp(col + kDCol[a], 0, kCols - 1);

    if (col == kWindColumn) {
        const double u = rng.uniform01();
        const int push = u < 0.8 ? 1 : (u < 0.9 ? 2 : 0);
        next_row = std::clamp(next_row - push, 0, kRows - 1);
    }

    if (next_row == kGoalRow && next_col == kGoalCol) {
        return RawStep{cell_index(next_row, next_col), 0.0, true};
    }
    if (next_row == kTrapRow && next_col == kTrapCol) {
        return RawStep{cell_index(next_row, next_col), kTrapPenalty, false};
    }
    return RawStep{cell_index(next_row, next_col), -1.0, false};
}

// ---------------------------------------------------------------------------
// GenericTabularMDP
// ---------------------------------------------------------------------------

GenericTabularMDP::GenericTabularMDP(EnvSpec spec, std::uint32_t start_state,
                                     std::vector<Row> rows)
    : Environment(std::move(spec)), start_(start_state), rows_(std::move(rows)) {
    const auto& sp = this->spec();
    by_pair_.resize(static_cast<std::size_t>(sp.state_count) * sp.action_count);
    for (std::uint32_t i = 0; i < rows_.size(); ++i) {
        const Row& r = rows_[i];
        by_pair_[static_cast<std::size_t>(r.state) * sp.action_count + r.action].push_back(i);
    }
    if (start_ >= sp.state_count) {
        throw std::invalid_argument(sp.name + ": start state out of range");
    }
    // probabilities per declared (state, action) must sum to 1
    for (std::uint32_t s = 0; s < sp.state_count; ++s) {
        bool any = false;
        for (std::uint32_t a = 0; a < sp.action_count; ++a) {
            if (!by_pair_[static_cast<std::size_t>(s) * sp.action_count + a].empty()) any = true;
        }
        if (!any) continue; // state with no outgoing rows: absorbing
        for (std::uint32_t a = 0; a < sp.action_count; ++a) {
            double total = 0.0;
            for (std::uint32_t i : by_pair_[static_cast<std::size_t>(s) * sp.action_count + a]) {
                total += rows_[i].probability;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                throw std::invalid_argument(sp.name + ": transition probabilities for state " +
                                            std::to_string(s) + " action " + std::to_string(a) +
                                            " sum to " + std::to_string(total));
            }
        }
    }
}

StateId GenericTabularMDP::state(std::uint32_t index) const {
    return StateId{index, one_hot(index, spec().state_count)};
}

std::uint32_t GenericTabularMDP::reset_impl(Rng&) { return start_; }

Environment::RawStep GenericTabularMDP::step_impl(std::uint32_t s, std::uint32_t a, Rng& rng) {
    const auto& candidates = by_pair_[static_cast<std::size_t>(s) * spec().action_count + a];
    if (candidates.empty()) {
        throw std::logic_error(spec().name + ": step from absorbing state " + std::to_string(s));
    }
    const double u = rng.uniform01();
    double cumulative = 0.0;
    for (std::uint32_t i : candidates) {
        cumulative += rows_[i].probability;
        if (u < cumulative) {
            return RawStep{rows_[i].next_state, rows_[i].reward, rows_[i].terminal};
        }
    }
    const Row& last = rows_[candidates.back()];
    return RawStep{last.next_state, last.reward, last.terminal};
}

std::unique_ptr<GenericTabularMDP> GenericTabularMDP::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open MDP file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

std::unique_ptr<GenericTabularMDP> GenericTabularMDP::parse(const std::string& text,
                                                            const std::string& origin) {
    EnvSpec spec;
    spec.name = "tabular:" + origin;
    spec.max_episode_steps = 1000;
    spec.discount_default = 1.0;
    std::uint32_t start = 0;
    bool have_states = false, have_actions = false;
    std::vector<Row> rows;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::string head;
        if (!(fields >> head)) continue;

        auto fail = [&](const std::string& why) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": " + why);
        };

        if (head == "states") {
            if (!(fields >> spec.state_count) || spec.state_count == 0) fail("bad state count");
            have_states = true;
        } else if (head == "actions") {
            if (!(fields >> spec.action_count) || spec.action_count == 0) fail("bad action count");
            have_actions = true;
        } else if (head == "start") {
            if (!(fields >> start)) fail("bad start state");
        } else if (head == "max_episode_steps") {
            if (!(fields >> spec.max_episode_steps) || spec.max_episode_steps < 1)
                fail("bad max_episode_steps");
        } else if (head == "discount") {
            if (!(fields >> spec.discount_default) || spec.discount_default <= 0.0 ||
                spec.discount_default > 1.0)
                fail("discount must be in (0, 1]");
        } else {
            Row row{};
            int terminal = 0;
            std::istringstream refields(line);
            if (!(refields >> row.state >> row.action >> row.next_state >> row.probability >>
                  row.reward >> terminal))
                fail("expected: state action next_state probability reward terminal");
            if (!have_states || !have_actions) fail("transition row before states/actions header");
            if (row.state >= spec.state_count || row.next_state >= spec.state_count)
                fail("state index out of range");
            if (row.action >= spec.action_count) fail("action index out of range");
            if (row.probability <= 0.0 || row.probability > 1.0) fail("probability out of range");
            row.terminal = terminal != 0;
            rows.push_back(row);
        }
    }
    if (!have_states || !have_actions) {
        throw std::invalid_argument(origin + ": missing states/actions header");
    }
    if (rows.empty()) throw std::invalid_argument(origin + ": no transition rows");
    return std::make_unique<GenericTabularMDP>(std::move(spec), start, std::move(rows));
}

std::unique_ptr<Environment> make_env(const std::string& name, const std::string& file) {
    if (name == "motivating_tree") return std::make_unique<MotivatingTree>();
    if (name == "windy_grid") return std::make_unique<WindyGrid>();
    if (name == "tabular") {
        if (file.empty()) throw std::invalid_argument("tabular environment requires env.file");
        return GenericTabularMDP::load(file);
    }
    throw std::invalid_argument("unknown environment: " + name);
}

} // namespace twomem
