// dtdsim — day-to-day route-choice simulator.
//
// Subcommands: run (simulate), analyze (metrics CSVs from run directories),
// fit (logistic switching regression), due (equilibrium reference),
// validate-config (parse + echo a config).
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dtdsim/equilibrium.hpp"
#include "dtdsim/error.hpp"
#include "dtdsim/metrics.hpp"
#include "dtdsim/regression.hpp"
#include "dtdsim/scenario.hpp"
#include "dtdsim/sim.hpp"

namespace fs = std::filesystem;
using namespace dtdsim;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string scenario_name;
    std::string out_dir = "out";
    std::int64_t seed = -1;
    int days = 0;
    int runs = 0;
    std::string decider_name;
    bool quiet = false;
};

/// Flags override config-file values, which override builtin defaults.
ScenarioConfig resolve_config(const CommonFlags& flags) {
    ScenarioConfig config;
    if (!flags.config_path.empty())
        config = load_config_file(flags.config_path);
    else if (!flags.scenario_name.empty())
        config = builtin_scenario(flags.scenario_name);
    else
        throw ConfigError("pass --config FILE or --scenario NAME");
    if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.days > 0) config.days = flags.days;
    if (flags.runs > 0) config.runs = flags.runs;
    if (!flags.decider_name.empty())
        config.decider.kind = decider_kind_from_name(flags.decider_name);
    config.validate();
    return config;
}

/// Loads every run_<i>/days.jsonl under the output directory (or the
/// directory itself when it holds a days.jsonl directly).
std::vector<std::vector<DayLog>> load_runs(const std::string& out_dir) {
    std::vector<std::vector<DayLog>> runs;
    if (fs::exists(fs::path(out_dir) / "days.jsonl")) {
        runs.push_back(read_days_jsonl((fs::path(out_dir) / "days.jsonl").string()));
        return runs;
    }
    for (int i = 1;; ++i) {
        const fs::path dir = fs::path(out_dir) / ("run_" + std::to_string(i));
        if (!fs::exists(dir / "days.jsonl")) break;
        runs.push_back(read_days_jsonl((dir / "days.jsonl").string()));
    }
    if (runs.empty())
        throw SimError("no run directories with days.jsonl under " + out_dir);
    return runs;
}

ScenarioConfig snapshot_config(const std::string& out_dir) {
    for (const auto* candidate : {"config.snapshot", "run_1/config.snapshot"}) {
        const fs::path path = fs::path(out_dir) / candidate;
        if (fs::exists(path)) return load_config_file(path.string());
    }
    throw SimError("no config.snapshot under " + out_dir);
}

/// Equilibrium travel time per route of each OD: the closed form when the OD
/// has two link-exclusive routes, the averaging solver otherwise.
std::map<OdPair, std::vector<double>> equilibrium_times(const BuiltScenario& scenario) {
    std::map<OdPair, std::vector<double>> result;

    bool closed_form_everywhere = true;
    for (const auto& d : scenario.demands) {
        const auto params = exclusive_route_params(scenario, d.od);
        if (!params || params->size() != 2) {
            closed_form_everywhere = false;
            break;
        }
        const DueSolution due = two_route_due((*params)[0], (*params)[1], d.travelers);
        result[d.od] = due.route_costs.at(due.route_flows.begin()->first);
    }
    if (closed_form_everywhere) return result;

    result.clear();
    std::map<OdPair, double> demands;
    for (const auto& d : scenario.demands) demands[d.od] = d.travelers;
    const DueSolution ue = msa_ue(scenario.network, scenario.route_sets, demands, MsaConfig{});
    for (const auto& [od, costs] : ue.route_costs) result[od] = costs;
    return result;
}

int cmd_run(const CommonFlags& flags, int jobs, bool resume) {
    ScenarioConfig config = resolve_config(flags);
    SimOptions options;
    options.out_dir = flags.out_dir;
    options.resume = resume;
    options.jobs = jobs;
    options.quiet = flags.quiet;
    const auto results = run_simulation(config, options);
    if (!flags.quiet) {
        for (const auto& r : results)
            std::cout << "run " << r.run_index << ": " << r.days.size() << " days -> " << r.dir
                      << "\n";
    }
    return 0;
}

int cmd_analyze(const CommonFlags& flags) {
    const ScenarioConfig config = snapshot_config(flags.out_dir);
    const BuiltScenario scenario = build_scenario(config, config.seed);
    const auto runs = load_runs(flags.out_dir);

    std::vector<int> agent_units(scenario.agents.size());
    for (std::size_t i = 0; i < scenario.agents.size(); ++i)
        agent_units[scenario.agents[i].id] = scenario.agent_units[i];

    const fs::path analysis = fs::path(flags.out_dir) / "analysis";
    fs::create_directories(analysis);
    auto open = [&](const char* name) {
        std::ofstream out(analysis / name);
        if (!out) throw SimError("cannot write " + (analysis / name).string());
        return out;
    };

    {
        auto out = open("switching_rates.csv");
        write_switching_rates_csv(runs, agent_units, out);
    }
    {
        auto out = open("avg_switching_by_cost.csv");
        write_avg_switching_by_cost_csv(runs, agent_units, out);
    }
    {
        auto out = open("dsr.csv");
        write_dsr_csv(runs, agent_units, out);
    }
    const auto references = equilibrium_times(scenario);
    {
        auto out = open("stats.csv");
        write_stats_csv(runs, references, out);
    }
    if (!flags.quiet) {
        write_stats_csv(runs, references, std::cout);
        std::cout << "wrote " << analysis.string() << "/{switching_rates,avg_switching_by_cost,dsr,stats}.csv\n";
    }
    return 0;
}

int cmd_fit(const CommonFlags& flags) {
    const ScenarioConfig config = snapshot_config(flags.out_dir);
    const BuiltScenario scenario = build_scenario(config, config.seed);
    const auto runs = load_runs(flags.out_dir);

    std::vector<int> agent_units(scenario.agents.size());
    for (std::size_t i = 0; i < scenario.agents.size(); ++i)
        agent_units[scenario.agents[i].id] = scenario.agent_units[i];

    std::cout << "od,direction,theta0,theta1,se0,se1,p0,p1,n_obs,converged\n";
    for (const auto& d : scenario.demands) {
        const auto& rs = scenario.routes_for(d.od);
        if (rs.routes.size() != 2) {
            std::cerr << "skipping OD " << od_key(d.od)
                      << ": switching regression is defined for two-route settings\n";
            continue;
        }
        for (int from = 0; from < 2; ++from) {
            const int to = 1 - from;
            std::vector<SwitchObservation> observations;
            for (const auto& run : runs) {
                auto part = extract_observations(run, agent_units, d.od, from, to);
                observations.insert(observations.end(), part.begin(), part.end());
            }
            const FitResult fit = fit_switching(observations);
            std::cout << od_key(d.od) << ",p" << from + 1 << to + 1 << "," << fit.theta0 << ","
                      << fit.theta1 << "," << fit.se0 << "," << fit.se1 << "," << fit.p0 << ","
                      << fit.p1 << "," << fit.n_obs << "," << (fit.converged ? "yes" : "no")
                      << "\n";
            if (fit.separation)
                std::cerr << "warning: OD " << od_key(d.od) << " p" << from + 1 << to + 1
                          << " shows separated data; estimates diverged\n";
        }
    }
    return 0;
}

int cmd_due(const CommonFlags& flags) {
    ScenarioConfig config = resolve_config(flags);
    const BuiltScenario scenario = build_scenario(config, config.seed);

    bool closed_form = scenario.demands.size() == 1;
    if (closed_form) {
        const auto& d = scenario.demands.front();
        const auto params = exclusive_route_params(scenario, d.od);
        if (params && params->size() == 2) {
            const DueSolution due = two_route_due((*params)[0], (*params)[1], d.travelers);
            const auto& flows = due.route_flows.begin()->second;
            const auto& costs = due.route_costs.begin()->second;
            std::cout << "closed-form equilibrium for " << od_key(d.od) << " (demand "
                      << d.travelers << ")\n";
            for (std::size_t r = 0; r < flows.size(); ++r)
                std::cout << "  route " << r + 1 << ": flow " << flows[r] << ", cost "
                          << costs[r] << "\n";
            std::cout << "  max cost gap " << due.max_cost_gap << "\n";
            return 0;
        }
        closed_form = false;
    }

    std::map<OdPair, double> demands;
    for (const auto& d : scenario.demands) demands[d.od] = d.travelers;
    const DueSolution ue = msa_ue(scenario.network, scenario.route_sets, demands, MsaConfig{});
    std::cout << "averaging solver: " << (ue.converged ? "converged" : "NOT converged")
              << " after " << ue.iterations << " iterations, relative gap " << ue.relative_gap
              << "\n";
    for (const auto& [od, flows] : ue.route_flows) {
        const auto& costs = ue.route_costs.at(od);
        std::cout << "OD " << od_key(od) << "\n";
        for (std::size_t r = 0; r < flows.size(); ++r)
            std::cout << "  route " << r + 1 << ": flow " << flows[r] << ", cost " << costs[r]
                      << "\n";
    }
    std::cout << "demand-weighted mean travel time " << ue.mean_travel_time << "\n";
    return 0;
}

int cmd_validate_config(const CommonFlags& flags) {
    if (flags.config_path.empty()) throw ConfigError("pass --config FILE");
    const ScenarioConfig config = load_config_file(flags.config_path);
    std::cout << "ok: " << flags.config_path << "\n";
    write_config(config, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Day-to-day route-choice simulator: traveler agents pick routes, the network loads, "
        "memories update, metrics and reference equilibria come out.\n"
        "Exit codes: 0 success, 1 runtime failure, 2 configuration error."};
    app.require_subcommand(1);

    CommonFlags flags;
    int jobs = 1;
    bool resume = false;

    auto add_common = [&flags](CLI::App* cmd, bool with_scenario = true) {
        cmd->add_option("--config", flags.config_path, "Config file (key = value lines)");
        if (with_scenario)
            cmd->add_option("--scenario", flags.scenario_name,
                            "Builtin scenario: scenario1..scenario5 | ow");
        cmd->add_option("--out", flags.out_dir, "Output directory (default: out)");
        cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
    };

    CLI::App* run = app.add_subcommand("run", "Simulate and persist run directories");
    add_common(run);
    run->add_option("--seed", flags.seed, "Base seed; replication i uses seed+i-1");
    run->add_option("--days", flags.days, "Days per replication");
    run->add_option("--runs", flags.runs, "Number of replications");
    run->add_option("--decider", flags.decider_name, "llm | mnl | prc | random | mock");
    run->add_option("--jobs", jobs, "Concurrent agent decisions within a day")
        ->check(CLI::PositiveNumber);
    run->add_flag("--resume", resume, "Continue an interrupted run directory");

    CLI::App* analyze =
        app.add_subcommand("analyze", "Write metric CSVs for existing run directories");
    add_common(analyze, false);

    CLI::App* fit = app.add_subcommand("fit", "Fit the logistic switching model to run logs");
    add_common(fit, false);

    CLI::App* due = app.add_subcommand("due", "Print the equilibrium reference for a scenario");
    add_common(due);

    CLI::App* validate = app.add_subcommand("validate-config", "Parse a config and echo it back");
    validate->add_option("--config", flags.config_path, "Config file to validate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are configuration errors
    }

    try {
        if (run->parsed()) return cmd_run(flags, jobs, resume);
        if (analyze->parsed()) return cmd_analyze(flags);
        if (fit->parsed()) return cmd_fit(flags);
        if (due->parsed()) return cmd_due(flags);
        if (validate->parsed()) return cmd_validate_config(flags);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
