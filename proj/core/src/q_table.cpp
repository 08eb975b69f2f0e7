#include "twomem/q_table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace twomem {

QTable::QTable(std::uint32_t action_count, double alpha, double gamma)
    : action_count_(action_count), alpha_(alpha), gamma_(gamma) {
    if (action_count == 0) throw std::invalid_argument("action_count must be positive");
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in (0, 1]");
    if (gamma <= 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in (0, 1]");
}

double QTable::value(std::uint32_t s, std::uint32_t a) const {
    const auto it = values_.find(key(s, a));
    return it == values_.end() ? 0.0 : it->second;
}

double QTable::max_value(std::uint32_t s) const {
    double best = value(s, 0);
    for (std::uint32_t a = 1; a < action_count_; ++a) best = std::max(best, value(s, a));
    return best;
}

double QTable::td_update(std::span<const Transition> batch) {
    if (batch.empty()) throw std::invalid_argument("td_update: empty batch");
    double abs_error_sum = 0.0;
    for (const Transition& t : batch) {
        const double target =
            t.terminal ? t.reward : t.reward + gamma_ * max_value(t.next_state.index);
        double& q = values_[key(t.state.index, t.action.index)];
        abs_error_sum += std::abs(target - q);
        q += alpha_ * (target - q);
    }
    return abs_error_sum / static_cast<double>(batch.size());
}

ActionId QTable::greedy_action(const StateId& state) const {
    std::uint32_t best = 0;
    double best_value = value(state.index, 0);
    for (std::uint32_t a = 1; a < action_count_; ++a) {
        const double v = value(state.index, a);
        if (v > best_value) {
            best_value = v;
            best = a;
        }
    }
    return ActionId{best};
}

double QTable::q_sum(const Environment& env) const {
    double total = 0.0;
    for (const auto& [state, action] : enumerate_state_actions(env)) {
        total += value(state.index, action.index);
    }
    return total;
}

std::string QTable::snapshot() const {
    std::vector<std::pair<std::uint64_t, double>> entries(values_.begin(), values_.end());
    std::sort(entries.begin(), entries.end());
    std::ostringstream out;
    for (const auto& [k, v] : entries) {
        if (v == 0.0) continue;
        out << (k >> 32) << ' ' << (k & 0xFFFFFFFFULL) << ' ' << v << '\n';
    }
    return out.str();
}

} // namespace twomem
