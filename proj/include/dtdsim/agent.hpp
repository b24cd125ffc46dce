#pragma once

#include <cstdint>
#include <vector>

#include "dtdsim/network.hpp"
#include "dtdsim/profile.hpp"

namespace dtdsim {

/// Exponentially weighted moving average with weight `omega` on the newest
/// observation. The first observation seeds the average directly.
double ewmatt_update(double previous, double observation, double omega, bool has_previous);

/// What one traveler remembers about one route.
struct RouteMemory {
    int chosen_count = 0;   // days this route was actually driven
    double ewmatt = 0.0;    // meaningful only when observed
    bool observed = false;  // at least one travel-time observation folded in
};

/// Which routes report their realized travel time back to the traveler.
enum class Feedback {
    kAllRoutes,   // every route's time is observed each day
    kChosenOnly,  // only the driven route's time is observed
};

struct AgentState {
    int id = 0;
    OdPair od{0, 0};
    Profile profile;
    std::vector<RouteMemory> memories;  // one per route in the OD's route set
    int last_choice = -1;               // route index; -1 before the first day
    // Yesterday's observed travel time per route; NaN where feedback did not
    // cover the route. Empty before the first day.
    std::vector<double> yesterday_times;
    double last_travel_time = 0.0;
    double last_bonus = 0.0;
    double cumulative_bonus = 0.0;

    int days_traveled() const;  // sum of chosen counts
};

/// Reward for beating the reference time: rate * (reference - travel_time),
/// floored at zero.
double compute_bonus(double travel_time, double reference_time, double rate_per_minute);

/// Folds one day's outcome into the traveler's memory: bumps the chosen
/// route's count, updates EWMATTs for the routes covered by `feedback`,
/// and accrues the bonus (pass rate 0 to disable bonuses).
void update_memory(AgentState& agent, int choice, const std::vector<double>& route_times,
                   Feedback feedback, double omega, double bonus_reference_time,
                   double bonus_rate_per_minute);

/// Cost the traveler acts on for route `r`: the EWMATT when the route has
/// been observed, otherwise the free-flow time as an optimistic prior.
double perceived_time(const AgentState& agent, int route, const std::vector<double>& free_flow_times);

}  // namespace dtdsim
