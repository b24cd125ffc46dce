#include "dtdsim/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dtdsim/error.hpp"
#include "dtdsim/llm_client.hpp"
#include "dtdsim/rng.hpp"

namespace dtdsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDayChoiceStream = 0x6461792d63686f6fULL;

std::map<OdPair, std::vector<double>> free_flow_table(const BuiltScenario& scenario) {
    std::map<OdPair, std::vector<double>> table;
    for (const auto& [od, rs] : scenario.route_sets) {
        auto& times = table[od];
        times.reserve(rs.routes.size());
        for (const auto& route : rs.routes)
            times.push_back(route_free_flow_time(scenario.network, route));
    }
    return table;
}

/// Decide for every agent; index i of the result belongs to agent i. Thread
/// count never changes the outcome because each decision draws from its own
/// (run_seed, agent, day) random stream.
std::vector<Decision> decide_all(int day, BuiltScenario& scenario, Decider& decider,
                                 std::uint64_t run_seed, int jobs,
                                 const std::map<OdPair, std::vector<double>>& free_flow) {
    const auto agent_count = scenario.agents.size();
    std::vector<Decision> decisions(agent_count);

    auto decide_one = [&](std::size_t i) {
        AgentState& agent = scenario.agents[i];
        Rng rng(mix_seed(run_seed, kDayChoiceStream,
                         (static_cast<std::uint64_t>(agent.id) << 20) ^
                             static_cast<std::uint64_t>(day)));
        const auto& priors = free_flow.at(agent.od);
        if (day == 1) {
            // No history exists yet; every decider kind starts uniformly.
            decisions[i] = {static_cast<int>(rng.bounded(priors.size())), "first day", false};
            return;
        }
        DeciderInput input{day, &agent, &priors};
        decisions[i] = decider.decide(input, rng);
        const auto route_count = static_cast<int>(priors.size());
        if (decisions[i].route < 0 || decisions[i].route >= route_count)
            throw SimError("decider returned route " + std::to_string(decisions[i].route) +
                           " outside the route set of agent " + std::to_string(agent.id));
    };

    const int workers = std::min<int>(jobs, static_cast<int>(agent_count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < agent_count; ++i) decide_one(i);
        return decisions;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < agent_count; i = next.fetch_add(1)) {
                try {
                    decide_one(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return decisions;
}

json od_vector_json(const RouteFlows& table) {
    json out = json::object();
    for (const auto& [od, values] : table) out[od_key(od)] = values;
    return out;
}

RouteFlows od_vector_from_json(const json& j) {
    RouteFlows table;
    for (const auto& [key, values] : j.items())
        table[od_from_key(key)] = values.get<std::vector<double>>();
    return table;
}

}  // namespace

json DayLog::to_json() const {
    json agents_json = json::array();
    for (const auto& a : agents) {
        agents_json.push_back(json{{"id", a.agent_id},
                                   {"od", od_key(a.od)},
                                   {"route", a.route},
                                   {"tt", a.travel_time},
                                   {"bonus", a.bonus},
                                   {"fallback", a.fallback},
                                   {"reason", a.reason}});
    }
    json links = json::object();
    for (const auto& [id, flow] : link_flows) links[std::to_string(id)] = flow;
    return json{{"day", day},
                {"agents", std::move(agents_json)},
                {"route_flows", od_vector_json(route_flows)},
                {"route_times", od_vector_json(route_times)},
                {"link_flows", std::move(links)}};
}

DayLog DayLog::from_json(const json& j) {
    DayLog log;
    log.day = j.at("day").get<int>();
    for (const auto& a : j.at("agents")) {
        AgentDayRecord record;
        record.agent_id = a.at("id").get<int>();
        record.od = od_from_key(a.at("od").get<std::string>());
        record.route = a.at("route").get<int>();
        record.travel_time = a.at("tt").get<double>();
        record.bonus = a.at("bonus").get<double>();
        record.fallback = a.at("fallback").get<bool>();
        record.reason = a.at("reason").get<std::string>();
        log.agents.push_back(std::move(record));
    }
    log.route_flows = od_vector_from_json(j.at("route_flows"));
    log.route_times = od_vector_from_json(j.at("route_times"));
    for (const auto& [key, flow] : j.at("link_flows").items())
        log.link_flows[std::stoi(key)] = flow.get<double>();
    return log;
}

DayLog run_day(int day, BuiltScenario& scenario, Decider& decider, std::uint64_t run_seed,
               int jobs) {
    if (day < 1) throw SimError("days are 1-based");
    const auto free_flow = free_flow_table(scenario);
    const auto decisions = decide_all(day, scenario, decider, run_seed, jobs, free_flow);

    RouteFlows flows;
    for (const auto& [od, rs] : scenario.route_sets)
        flows[od].assign(rs.routes.size(), 0.0);
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& agent = scenario.agents[i];
        flows[agent.od][static_cast<std::size_t>(decisions[i].route)] +=
            scenario.agent_units[i];
    }

    // Conservation is an exact integer identity: every traveler is on exactly
    // one route of their OD.
    for (const auto& d : scenario.demands) {
        double sum = 0.0;
        for (double f : flows.at(d.od)) sum += f;
        if (std::llround(sum) != d.travelers)
            throw SimError("flow conservation violated on day " + std::to_string(day) +
                           " for OD " + od_key(d.od) + ": " + std::to_string(sum) + " vs " +
                           std::to_string(d.travelers));
    }

    const LoadResult loaded = load_network(scenario.network, flows, scenario.route_sets);

    DayLog log;
    log.day = day;
    log.route_flows = flows;
    log.route_times = loaded.route_times;
    log.link_flows = loaded.link_flows;

    const double bonus_rate =
        scenario.config.bonus.enabled ? scenario.config.bonus.rate_per_minute : 0.0;
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        AgentState& agent = scenario.agents[i];
        const auto& times = loaded.route_times.at(agent.od);
        update_memory(agent, decisions[i].route, times, scenario.config.feedback,
                      scenario.config.omega, scenario.config.bonus.reference_time, bonus_rate);
        AgentDayRecord record;
        record.agent_id = agent.id;
        record.od = agent.od;
        record.route = decisions[i].route;
        record.travel_time = agent.last_travel_time;
        record.bonus = agent.last_bonus;
        record.fallback = decisions[i].fallback;
        record.reason = decisions[i].reason;
        log.agents.push_back(std::move(record));
    }
    return log;
}

std::vector<DayLog> read_days_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError("cannot open day log: " + path);
    std::vector<DayLog> days;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw SimError(path + ":" + std::to_string(line_no) + ": malformed day record");
        days.push_back(DayLog::from_json(j));
    }
    return days;
}

namespace {

/// Feeds a logged day back through the agents: logged choices, recomputed
/// loading. The recomputation must reproduce the logged times exactly —
/// anything else means the directory does not belong to this configuration.
void replay_day(const DayLog& logged, BuiltScenario& scenario) {
    RouteFlows flows;
    for (const auto& [od, rs] : scenario.route_sets) flows[od].assign(rs.routes.size(), 0.0);
    if (logged.agents.size() != scenario.agents.size())
        throw SimError("day " + std::to_string(logged.day) + ": log has " +
                       std::to_string(logged.agents.size()) + " agents, scenario has " +
                       std::to_string(scenario.agents.size()));
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& record = logged.agents[i];
        if (record.agent_id != scenario.agents[i].id || record.od != scenario.agents[i].od)
            throw SimError("day " + std::to_string(logged.day) +
                           ": log order does not match the scenario's agents");
        flows[record.od][static_cast<std::size_t>(record.route)] += scenario.agent_units[i];
    }
    const LoadResult loaded = load_network(scenario.network, flows, scenario.route_sets);
    for (const auto& [od, times] : loaded.route_times) {
        const auto& logged_times = logged.route_times.at(od);
        for (std::size_t r = 0; r < times.size(); ++r)
            if (times[r] != logged_times[r])
                throw SimError("day " + std::to_string(logged.day) + ": logged route times for " +
                               od_key(od) + " do not match this configuration");
    }
    const double bonus_rate =
        scenario.config.bonus.enabled ? scenario.config.bonus.rate_per_minute : 0.0;
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        update_memory(scenario.agents[i], logged.agents[i].route, loaded.route_times.at(
                          scenario.agents[i].od),
                      scenario.config.feedback, scenario.config.omega,
                      scenario.config.bonus.reference_time, bonus_rate);
    }
}

}  // namespace

void write_summary_csv(const BuiltScenario& scenario, int run_index,
                       const std::vector<DayLog>& days, std::ostream& out) {
    out << "run,od,route,days,mean_travel_time,std_travel_time,mean_flow,final_flow\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const auto& [od, rs] : scenario.route_sets) {
        for (std::size_t r = 0; r < rs.routes.size(); ++r) {
            double sum = 0.0, sum_sq = 0.0, flow_sum = 0.0;
            for (const auto& d : days) {
                const double t = d.route_times.at(od)[r];
                sum += t;
                sum_sq += t * t;
                flow_sum += d.route_flows.at(od)[r];
            }
            const auto n = static_cast<double>(days.size());
            const double mean = n > 0 ? sum / n : 0.0;
            const double variance = n > 0 ? std::max(0.0, sum_sq / n - mean * mean) : 0.0;
            const double final_flow = days.empty() ? 0.0 : days.back().route_flows.at(od)[r];
            out << run_index << "," << od_key(od) << "," << r + 1 << "," << days.size() << ","
                << num(mean) << "," << num(std::sqrt(variance)) << ","
                << num(n > 0 ? flow_sum / n : 0.0) << "," << num(final_flow) << "\n";
        }
    }
}

std::vector<RunResult> run_simulation(const ScenarioConfig& config, const SimOptions& options) {
    config.validate();
    std::vector<RunResult> results;

    for (int rep = 1; rep <= config.runs; ++rep) {
        const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(rep - 1);
        BuiltScenario scenario = build_scenario(config, run_seed);
        auto decider = make_decider(config);

        RunResult result;
        result.run_index = rep;
        result.run_seed = run_seed;

        fs::path run_dir;
        std::ofstream log_out;
        std::mutex transcript_mutex;
        if (!options.out_dir.empty()) {
            run_dir = fs::path(options.out_dir) / ("run_" + std::to_string(rep));
            fs::create_directories(run_dir);
            result.dir = run_dir.string();

            {
                std::ofstream snapshot(run_dir / "config.snapshot");
                if (!snapshot) throw SimError("cannot write " + (run_dir / "config.snapshot").string());
                write_config(config, snapshot);
            }

            if (auto* llm = dynamic_cast<LlmDecider*>(decider.get())) {
                const fs::path llm_dir = run_dir / "llm";
                fs::create_directories(llm_dir);
                llm->set_transcript_sink([llm_dir, &transcript_mutex](int agent_id, int day,
                                                                      const json& transcript) {
                    std::lock_guard lock(transcript_mutex);
                    std::ofstream out(llm_dir / ("day" + std::to_string(day) + "_agent" +
                                                 std::to_string(agent_id) + ".json"));
                    out << transcript.dump(2) << "\n";
                });
            }

            const fs::path log_path = run_dir / "days.jsonl";
            if (options.resume && fs::exists(log_path)) {
                result.days = read_days_jsonl(log_path.string());
                for (const auto& logged : result.days) replay_day(logged, scenario);
                log_out.open(log_path, std::ios::app);
            } else {
                log_out.open(log_path, std::ios::trunc);
            }
            if (!log_out) throw SimError("cannot write " + log_path.string());
        }

        const int start_day = static_cast<int>(result.days.size()) + 1;
        for (int day = start_day; day <= config.days; ++day) {
            DayLog log = run_day(day, scenario, *decider, run_seed, options.jobs);
            if (log_out.is_open()) {
                log_out << log.to_json().dump() << "\n";
                log_out.flush();
            }
            result.days.push_back(std::move(log));
            if (!options.quiet && (day % 20 == 0 || day == config.days))
                std::fprintf(stderr, "run %d: day %d/%d\n", rep, day, config.days);
        }

        if (!run_dir.empty()) {
            std::ofstream summary(run_dir / "summary.csv");
            if (!summary) throw SimError("cannot write " + (run_dir / "summary.csv").string());
            write_summary_csv(scenario, rep, result.days, summary);
        }
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace dtdsim
