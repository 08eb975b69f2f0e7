#pragma once

#include <cmath>
#include <cstdint>

namespace twomem {

enum class ScheduleKind { decayed, constant, increased };

inline const char* to_string(ScheduleKind kind) {
    switch (kind) {
    case ScheduleKind::decayed: return "decayed";
    case ScheduleKind::constant: return "constant";
    default: return "increased";
    }
}

// Episode-level probability of handing the next training episode to the
// episodic memory, as an exponential interpolation from p_start to p_end
// over environment steps. temperature controls the speed of the transition.
struct Schedule {
    double p_start = 0.9;
    double p_end = 0.1;
    double temperature = 10000.0;

    // p_start at step 0, approaching p_end as steps grow. Evaluated as a
    // convex combination so both endpoints are hit exactly.
    double ec_probability(std::uint64_t steps_taken) const {
        if (p_start == p_end) return p_start;
        const double w = std::exp(-static_cast<double>(steps_taken) / temperature);
        return p_start * w + p_end * (1.0 - w);
    }

    ScheduleKind kind() const {
        if (p_start > p_end) return ScheduleKind::decayed;
        if (p_start < p_end) return ScheduleKind::increased;
        return ScheduleKind::constant;
    }
};

} // namespace twomem
