#include "dtdsim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtdsim/error.hpp"

namespace dtdsim {

double ewmatt_update(double previous, double observation, double omega, bool has_previous) {
    if (omega <= 0.0 || omega > 1.0) throw ConfigError("memory weight must lie in (0, 1]");
    if (!has_previous) return observation;
    return omega * observation + (1.0 - omega) * previous;
}

int AgentState::days_traveled() const {
    int total = 0;
    for (const auto& m : memories) total += m.chosen_count;
    return total;
}

double compute_bonus(double travel_time, double reference_time, double rate_per_minute) {
    const double raw = rate_per_minute * std::max(0.0, reference_time - travel_time);
    return std::round(raw * 100.0) / 100.0;  // settle in whole cents
}

void update_memory(AgentState& agent, int choice, const std::vector<double>& route_times,
                   Feedback feedback, double omega, double bonus_reference_time,
                   double bonus_rate_per_minute) {
    const auto n = static_cast<int>(agent.memories.size());
    if (choice < 0 || choice >= n) throw SimError("route choice out of range");
    if (route_times.size() != agent.memories.size())
        throw SimError("route time vector does not match the traveler's route set");

    agent.memories[choice].chosen_count += 1;
    agent.yesterday_times.assign(route_times.size(), std::numeric_limits<double>::quiet_NaN());
    for (int r = 0; r < n; ++r) {
        if (feedback == Feedback::kChosenOnly && r != choice) continue;
        auto& m = agent.memories[r];
        m.ewmatt = ewmatt_update(m.ewmatt, route_times[r], omega, m.observed);
        m.observed = true;
        agent.yesterday_times[static_cast<std::size_t>(r)] = route_times[static_cast<std::size_t>(r)];
    }

    agent.last_choice = choice;
    agent.last_travel_time = route_times[choice];
    agent.last_bonus =
        compute_bonus(route_times[choice], bonus_reference_time, bonus_rate_per_minute);
    agent.cumulative_bonus += agent.last_bonus;
}

double perceived_time(const AgentState& agent, int route,
                      const std::vector<double>& free_flow_times) {
    const auto& m = agent.memories.at(static_cast<std::size_t>(route));
    if (m.observed) return m.ewmatt;
    return free_flow_times.at(static_cast<std::size_t>(route));
}

}  // namespace dtdsim
