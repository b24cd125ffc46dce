#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dtdsim/sim.hpp"

namespace dtdsim {

/// Route-to-route movement between day `day` and day+1 for one OD, in
/// traveler units. rate(i, j) = moved[i][j] / occupants[i]; a route with no
/// occupants has no defined rates.
struct DaySwitchMatrix {
    int day = 0;
    std::vector<std::vector<double>> moved;
    std::vector<double> occupants;

    bool defined(int from) const;
    double rate(int from, int to) const;  // throws SimError when undefined
};

using SwitchSeries = std::map<OdPair, std::vector<DaySwitchMatrix>>;

/// Consecutive-day switching counts; `agent_units[id]` is the traveler count
/// one agent record stands for. Needs at least two days.
SwitchSeries switching_rates(const std::vector<DayLog>& days,
                             const std::vector<int>& agent_units);

/// One route-cost vector rounded to two decimals, e.g. "22.00|54.00" — days
/// sharing the key are averaged together.
std::string cost_combo_key(const std::vector<double>& route_times);

struct CostComboStat {
    std::vector<std::vector<double>> rate_sum;  // from x to, sum of daily rates
    std::vector<std::vector<int>> days_counted;  // defined-rate days entering the sum
};

/// Mean switching rate per (cost combination, route pair): for each from-
/// route, only days where the route had occupants contribute.
std::map<OdPair, std::map<std::string, CostComboStat>> average_switching_by_cost(
    const std::vector<DayLog>& days, const SwitchSeries& series);

/// Fraction of all travelers whose route changed between consecutive days;
/// element t-1 covers the transition day t -> t+1.
std::vector<double> day_switching_rate(const std::vector<DayLog>& days,
                                       const std::vector<int>& agent_units);

struct RouteStats {
    double reference = 0.0;  // equilibrium travel time
    double mean = 0.0;
    double rel_gap = 0.0;  // (mean - reference) / reference
    double std_dev = 0.0;  // population
};

/// Travel-time mean and population std per route over days [first_day,
/// last_day], against per-route equilibrium references.
std::map<OdPair, std::vector<RouteStats>> descriptive_stats(
    const std::vector<DayLog>& days,
    const std::map<OdPair, std::vector<double>>& reference_times, int first_day, int last_day);

// CSV emitters over one or more replications. `runs[i]` is replication i+1's
// day sequence; every file carries per-run rows plus "pooled" rows that merge
// all replications.
void write_switching_rates_csv(const std::vector<std::vector<DayLog>>& runs,
                               const std::vector<int>& agent_units, std::ostream& out);
void write_avg_switching_by_cost_csv(const std::vector<std::vector<DayLog>>& runs,
                                     const std::vector<int>& agent_units, std::ostream& out);
void write_dsr_csv(const std::vector<std::vector<DayLog>>& runs,
                   const std::vector<int>& agent_units, std::ostream& out);
void write_stats_csv(const std::vector<std::vector<DayLog>>& runs,
                     const std::map<OdPair, std::vector<double>>& reference_times,
                     std::ostream& out);

}  // namespace dtdsim
