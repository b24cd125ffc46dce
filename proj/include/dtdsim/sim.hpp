#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtdsim/scenario.hpp"

namespace dtdsim {

struct AgentDayRecord {
    int agent_id = 0;
    OdPair od{0, 0};
    int route = 0;
    double travel_time = 0.0;
    double bonus = 0.0;
    bool fallback = false;
    std::string reason;
};

/// Everything that happened on one simulated day. Serialized one-per-line
/// into days.jsonl; the JSON is canonical (sorted keys, agents ordered by
/// id), so identical runs produce identical bytes.
struct DayLog {
    int day = 0;
    std::vector<AgentDayRecord> agents;
    RouteFlows route_flows;
    RouteFlows route_times;
    std::map<int, double> link_flows;

    nlohmann::json to_json() const;
    static DayLog from_json(const nlohmann::json& j);
};

struct SimOptions {
    std::string out_dir;   // empty: in-memory only, nothing persisted
    bool resume = false;   // continue a run directory from its last logged day
    int jobs = 1;          // concurrent agent decisions within a day
    bool quiet = true;
};

struct RunResult {
    int run_index = 0;  // 1-based replication number
    std::uint64_t run_seed = 0;
    std::vector<DayLog> days;
    std::string dir;  // run directory, empty when not persisted
};

/// One day of the loop: every agent decides (day 1 is a uniform random start
/// for every decider kind), flows aggregate, the network loads, and memories
/// update. Throws SimError if per-OD flows fail to add up to demand.
DayLog run_day(int day, BuiltScenario& scenario, Decider& decider, std::uint64_t run_seed,
               int jobs = 1);

/// Runs `config.runs` replications seeded seed, seed+1, ... Each replication
/// gets its own run_<i> directory (config.snapshot, days.jsonl, summary.csv,
/// llm/ transcripts) when out_dir is set, persisted day by day; with
/// options.resume an interrupted directory is replayed and continued, and the
/// continuation is identical to an uninterrupted run.
std::vector<RunResult> run_simulation(const ScenarioConfig& config,
                                      const SimOptions& options = {});

std::vector<DayLog> read_days_jsonl(const std::string& path);

/// Per-route travel-time and flow statistics for one replication.
void write_summary_csv(const BuiltScenario& scenario, int run_index,
                       const std::vector<DayLog>& days, std::ostream& out);

}  // namespace dtdsim
