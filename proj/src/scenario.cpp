#include "dtdsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dtdsim/error.hpp"
#include "dtdsim/rng.hpp"
#include "dtdsim/routeset.hpp"

namespace dtdsim {

namespace {

// ---------------------------------------------------------------------------
// Builtin networks.
//
// The five two-route settings are a single OD served by two parallel links;
// link cost = t0 + slope * travelers on it.
//
// The grid ("ow") is a 13-node city: two-way streets, 48 directed links, and
// a 0.02 min per vehicle slope everywhere. Its canonical copy lives in
// assets/ow_network.txt; keep the two byte-identical (a test enforces this).
// ---------------------------------------------------------------------------

constexpr const char* kTwoRouteHeader = "# two parallel routes between node 1 and node 2\n";

std::string two_route_network(double t01, double s1, double t02, double s2) {
    std::ostringstream out;
    out << kTwoRouteHeader << "nodes 2\n";
    out << "1 1 2 " << t01 << " " << s1 << "\n";
    out << "2 1 2 " << t02 << " " << s2 << "\n";
    return out.str();
}

constexpr const char* kGridNetworkText = R"NET(# 13-node grid city: two-way streets, one directed link per direction.
# Nodes 1..13 correspond to letters A..M. Every street has cost
# t0 + 0.02 * flow, with flow in vehicles per hour.
nodes 13
1 1 3 12 0.02
2 3 1 12 0.02
3 1 4 9 0.02
4 4 1 9 0.02
5 1 7 21 0.02
6 7 1 21 0.02
7 2 4 12 0.02
8 4 2 12 0.02
9 2 5 9 0.02
10 5 2 9 0.02
11 2 8 18 0.02
12 8 2 18 0.02
13 3 4 6 0.02
14 4 3 6 0.02
15 3 6 12 0.02
16 6 3 12 0.02
17 4 5 6 0.02
18 5 4 6 0.02
19 4 7 12 0.02
20 7 4 12 0.02
21 5 8 12 0.02
22 8 5 12 0.02
23 6 7 6 0.02
24 7 6 6 0.02
25 6 9 12 0.02
26 9 6 12 0.02
27 6 12 21 0.02
28 12 6 21 0.02
29 7 8 6 0.02
30 8 7 6 0.02
31 7 10 12 0.02
32 10 7 12 0.02
33 8 11 12 0.02
34 11 8 12 0.02
35 9 10 6 0.02
36 10 9 6 0.02
37 9 12 12 0.02
38 12 9 12 0.02
39 10 11 6 0.02
40 11 10 6 0.02
41 10 12 12 0.02
42 12 10 12 0.02
43 10 13 12 0.02
44 13 10 12 0.02
45 11 13 12 0.02
46 13 11 12 0.02
47 12 13 6 0.02
48 13 12 6 0.02
)NET";

std::string commuter_text(int total_travelers) {
    std::ostringstream out;
    out << "You commute from home to work by car every morning, and so do "
        << total_travelers - 1
        << " other travelers. Each route's travel time grows with the number of travelers "
           "choosing it. A faster trip earns a larger daily bonus, paid in RMB.";
    return out.str();
}

constexpr const char* kGridText =
    "You drive from your origin to your destination every morning, sharing a city street "
    "grid with many other drivers. Each street's travel time grows with the traffic on it.";

std::string strip(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

long long to_int(const std::string& key, const std::string& value) {
    long long result = 0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, result);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("config key '" + key + "' needs an integer, got '" + value + "'");
    return result;
}

double to_double(const std::string& key, const std::string& value) {
    double result = 0.0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, result);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("config key '" + key + "' needs a number, got '" + value + "'");
    return result;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "' needs true or false, got '" + value + "'");
}

std::string fmt(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

MockMode mock_mode_from_name(const std::string& name) {
    if (name == "argmin") return MockMode::kArgmin;
    if (name == "epsilon_greedy") return MockMode::kEpsilonGreedy;
    if (name == "cyclic") return MockMode::kCyclic;
    throw ConfigError("unknown mock_mode '" + name + "' (argmin | epsilon_greedy | cyclic)");
}

std::string mock_mode_name(MockMode mode) {
    switch (mode) {
        case MockMode::kArgmin: return "argmin";
        case MockMode::kEpsilonGreedy: return "epsilon_greedy";
        case MockMode::kCyclic: return "cyclic";
    }
    throw ConfigError("unhandled mock mode");
}

DemandEntry parse_demand(const std::string& value) {
    std::istringstream in(value);
    DemandEntry entry;
    if (!(in >> entry.od.first >> entry.od.second >> entry.travelers))
        throw ConfigError("demand needs 'origin destination travelers', got '" + value + "'");
    std::string tail;
    if (in >> tail) throw ConfigError("trailing text after demand entry: '" + value + "'");
    return entry;
}

}  // namespace

DeciderKind decider_kind_from_name(const std::string& name) {
    if (name == "llm") return DeciderKind::kLlm;
    if (name == "mnl") return DeciderKind::kMnl;
    if (name == "prc") return DeciderKind::kPrc;
    if (name == "random") return DeciderKind::kRandom;
    if (name == "mock") return DeciderKind::kMock;
    throw ConfigError("unknown decider '" + name + "' (llm | mnl | prc | random | mock)");
}

std::string decider_kind_name(DeciderKind kind) {
    switch (kind) {
        case DeciderKind::kLlm: return "llm";
        case DeciderKind::kMnl: return "mnl";
        case DeciderKind::kPrc: return "prc";
        case DeciderKind::kRandom: return "random";
        case DeciderKind::kMock: return "mock";
    }
    throw ConfigError("unhandled decider kind");
}

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = {"scenario1", "scenario2", "scenario3",
                                                   "scenario4", "scenario5", "ow"};
    return names;
}

std::string builtin_network_text(const std::string& name) {
    if (name == "scenario1") return two_route_network(6, 2, 6, 2);
    if (name == "scenario2") return two_route_network(10, 4, 24, 6);
    if (name == "scenario3") return two_route_network(5, 2, 12, 3);
    if (name == "scenario4") return two_route_network(12, 4, 24, 6);
    if (name == "scenario5") return two_route_network(6, 2, 12, 3);
    if (name == "ow") return kGridNetworkText;
    throw ConfigError("unknown builtin scenario '" + name + "'");
}

ScenarioConfig builtin_scenario(const std::string& name) {
    ScenarioConfig config;
    config.name = name;
    if (name == "ow") {
        config.demands = {{{1, 12}, 600}, {{1, 13}, 400}, {{2, 12}, 300}, {{2, 13}, 400}};
        config.travelers_per_agent = 20;
        config.k_routes = 5;
        config.feedback = Feedback::kChosenOnly;
        config.selfish_profiles = true;
        config.bonus.enabled = false;
        config.decider.llm.temperature = 0.5;
        config.scenario_text = kGridText;
        return config;
    }
    builtin_network_text(name);  // validates the name
    config.demands = {{{1, 2}, 16}};
    config.travelers_per_agent = 1;
    config.k_routes = 2;
    config.feedback = Feedback::kAllRoutes;
    config.bonus.enabled = true;
    config.decider.llm.temperature = 0.0;
    config.scenario_text = commuter_text(16);
    return config;
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ConfigError("scenario name must not be empty");
    if (network_file.empty()) builtin_network_text(name);  // must be a builtin
    if (demands.empty()) throw ConfigError("at least one demand entry is required");
    std::set<OdPair> seen;
    for (const auto& d : demands) {
        if (d.travelers <= 0) throw ConfigError("demand travelers must be positive");
        if (!seen.insert(d.od).second)
            throw ConfigError("duplicate demand for OD " + od_key(d.od));
    }
    if (travelers_per_agent < 1) throw ConfigError("travelers_per_agent must be at least 1");
    if (k_routes < 1) throw ConfigError("k_routes must be at least 1");
    if (days < 1) throw ConfigError("days must be at least 1");
    if (runs < 1) throw ConfigError("runs must be at least 1");
    if (omega <= 0.0 || omega > 1.0) throw ConfigError("omega must lie in (0, 1]");
    if (decider.kind == DeciderKind::kMnl && !(decider.alpha > 0.0))
        throw ConfigError("alpha must be positive for the mnl decider");
    if (decider.mock_epsilon < 0.0 || decider.mock_epsilon > 1.0)
        throw ConfigError("mock_epsilon must lie in [0, 1]");
    if (bonus.reference_time < 0.0 || bonus.rate_per_minute < 0.0)
        throw ConfigError("bonus settings must be non-negative");
    if (decider.kind == DeciderKind::kLlm) decider.llm.validate();
}

ScenarioConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': " + text);
        pairs.emplace_back(strip(text.substr(0, eq)), unquote(strip(text.substr(eq + 1))));
    }

    ScenarioConfig config;
    bool based_on_builtin = false;
    for (const auto& [key, value] : pairs) {
        if (key == "scenario") {
            config = builtin_scenario(value);
            based_on_builtin = true;
        }
    }
    if (!based_on_builtin) config.demands.clear();

    bool demands_reset = false;
    for (const auto& [key, value] : pairs) {
        if (key == "scenario") continue;
        if (key == "network_file") {
            config.network_file = value;
            if (!based_on_builtin) config.name = "custom";
        } else if (key == "demand") {
            if (!demands_reset) {
                config.demands.clear();
                demands_reset = true;
            }
            config.demands.push_back(parse_demand(value));
        } else if (key == "travelers_per_agent") {
            config.travelers_per_agent = static_cast<int>(to_int(key, value));
        } else if (key == "k_routes") {
            config.k_routes = static_cast<int>(to_int(key, value));
        } else if (key == "days") {
            config.days = static_cast<int>(to_int(key, value));
        } else if (key == "runs") {
            config.runs = static_cast<int>(to_int(key, value));
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(to_int(key, value));
        } else if (key == "decider") {
            config.decider.kind = decider_kind_from_name(value);
        } else if (key == "alpha") {
            config.decider.alpha = to_double(key, value);
        } else if (key == "omega") {
            config.omega = to_double(key, value);
        } else if (key == "feedback") {
            if (value == "all_routes")
                config.feedback = Feedback::kAllRoutes;
            else if (value == "chosen_only")
                config.feedback = Feedback::kChosenOnly;
            else
                throw ConfigError("feedback must be all_routes or chosen_only, got '" + value +
                                  "'");
        } else if (key == "selfish") {
            config.selfish_profiles = to_bool(key, value);
        } else if (key == "bonus_enabled") {
            config.bonus.enabled = to_bool(key, value);
        } else if (key == "bonus_reference_time") {
            config.bonus.reference_time = to_double(key, value);
        } else if (key == "bonus_rate") {
            config.bonus.rate_per_minute = to_double(key, value);
        } else if (key == "mock_mode") {
            config.decider.mock_mode = mock_mode_from_name(value);
        } else if (key == "mock_epsilon") {
            config.decider.mock_epsilon = to_double(key, value);
        } else if (key == "scenario_text") {
            config.scenario_text = value;
        } else if (key == "llm_base_url") {
            config.decider.llm.base_url = value;
        } else if (key == "llm_model") {
            config.decider.llm.model_name = value;
        } else if (key == "llm_temperature") {
            config.decider.llm.temperature = to_double(key, value);
        } else if (key == "llm_max_retries") {
            config.decider.llm.max_retries = static_cast<int>(to_int(key, value));
        } else if (key == "llm_timeout") {
            config.decider.llm.request_timeout_seconds = to_double(key, value);
        } else if (key == "llm_max_concurrent") {
            config.decider.llm.max_concurrent_requests = static_cast<int>(to_int(key, value));
        } else if (key == "llm_api_key_env") {
            config.decider.llm.api_key_env = value;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

void write_config(const ScenarioConfig& config, std::ostream& out) {
    out << "# simulation configuration snapshot\n";
    out << "scenario = " << config.name << "\n";
    if (!config.network_file.empty()) out << "network_file = " << config.network_file << "\n";
    for (const auto& d : config.demands)
        out << "demand = " << d.od.first << " " << d.od.second << " " << d.travelers << "\n";
    out << "travelers_per_agent = " << config.travelers_per_agent << "\n";
    out << "k_routes = " << config.k_routes << "\n";
    out << "days = " << config.days << "\n";
    out << "runs = " << config.runs << "\n";
    out << "seed = " << config.seed << "\n";
    out << "decider = " << decider_kind_name(config.decider.kind) << "\n";
    out << "alpha = " << fmt(config.decider.alpha) << "\n";
    out << "omega = " << fmt(config.omega) << "\n";
    out << "feedback = "
        << (config.feedback == Feedback::kAllRoutes ? "all_routes" : "chosen_only") << "\n";
    out << "selfish = " << (config.selfish_profiles ? "true" : "false") << "\n";
    out << "bonus_enabled = " << (config.bonus.enabled ? "true" : "false") << "\n";
    out << "bonus_reference_time = " << fmt(config.bonus.reference_time) << "\n";
    out << "bonus_rate = " << fmt(config.bonus.rate_per_minute) << "\n";
    out << "mock_mode = " << mock_mode_name(config.decider.mock_mode) << "\n";
    out << "mock_epsilon = " << fmt(config.decider.mock_epsilon) << "\n";
    out << "scenario_text = \"" << config.scenario_text << "\"\n";
    out << "llm_base_url = " << config.decider.llm.base_url << "\n";
    out << "llm_model = " << config.decider.llm.model_name << "\n";
    out << "llm_temperature = " << fmt(config.decider.llm.temperature) << "\n";
    out << "llm_max_retries = " << config.decider.llm.max_retries << "\n";
    out << "llm_timeout = " << fmt(config.decider.llm.request_timeout_seconds) << "\n";
    out << "llm_max_concurrent = " << config.decider.llm.max_concurrent_requests << "\n";
    out << "llm_api_key_env = " << config.decider.llm.api_key_env << "\n";
}

int BuiltScenario::total_travelers() const {
    int total = 0;
    for (int units : agent_units) total += units;
    return total;
}

const RouteSet& BuiltScenario::routes_for(const OdPair& od) const {
    auto it = route_sets.find(od);
    if (it == route_sets.end()) throw SimError("no route set for OD " + od_key(od));
    return it->second;
}

BuiltScenario build_scenario(const ScenarioConfig& config, std::uint64_t agent_seed) {
    config.validate();

    Network network = [&] {
        if (!config.network_file.empty()) return Network::load_file(config.network_file);
        std::istringstream in(builtin_network_text(config.name));
        return Network::parse(in, config.name);
    }();

    RouteSetMap route_sets;
    for (const auto& d : config.demands)
        route_sets.emplace(d.od, k_shortest_routes(network, d.od.first, d.od.second,
                                                   config.k_routes));

    BuiltScenario built{config, std::move(network), std::move(route_sets), {}, {},
                        config.demands};

    int next_id = 0;
    for (const auto& d : config.demands) {
        const int route_count =
            static_cast<int>(built.route_sets.at(d.od).routes.size());
        int remaining = d.travelers;
        while (remaining > 0) {
            const int units = std::min(remaining, config.travelers_per_agent);
            AgentState agent;
            agent.id = next_id;
            agent.od = d.od;
            agent.profile = sample_profile(mix_seed(agent_seed, 0x70726f66696c6573ULL,
                                                    static_cast<std::uint64_t>(next_id)));
            agent.profile.selfish = config.selfish_profiles;
            agent.memories.assign(static_cast<std::size_t>(route_count), RouteMemory{});
            built.agents.push_back(std::move(agent));
            built.agent_units.push_back(units);
            remaining -= units;
            ++next_id;
        }
    }
    return built;
}

std::optional<std::vector<RouteCostParams>> exclusive_route_params(const BuiltScenario& scenario,
                                                                   const OdPair& od) {
    // A link shared by two routes couples their costs; the per-route linear
    // form only holds when every link belongs to exactly one route overall.
    std::map<int, int> link_users;
    for (const auto& [key, rs] : scenario.route_sets)
        for (const auto& route : rs.routes)
            for (int link_id : route.link_ids) link_users[link_id] += 1;

    auto it = scenario.route_sets.find(od);
    if (it == scenario.route_sets.end()) return std::nullopt;

    std::vector<RouteCostParams> params;
    for (const auto& route : it->second.routes) {
        RouteCostParams p{0.0, 0.0};
        for (int link_id : route.link_ids) {
            if (link_users.at(link_id) != 1) return std::nullopt;
            const Link& link = scenario.network.link_by_id(link_id);
            p.t0 += link.free_flow_time;
            p.sigma += link.slope;
        }
        params.push_back(p);
    }
    return params;
}

std::unique_ptr<Decider> make_decider(const ScenarioConfig& config) {
    switch (config.decider.kind) {
        case DeciderKind::kLlm: {
            config.decider.llm.validate();
            if (std::getenv(config.decider.llm.api_key_env.c_str()) == nullptr)
                throw ConfigError("decider 'llm' needs the API key env var " +
                                  config.decider.llm.api_key_env +
                                  " (export it, or pick --decider mock for offline runs)");
            auto client = std::make_shared<LlmClient>(config.decider.llm);
            return std::make_unique<LlmDecider>(std::move(client), config.scenario_text,
                                                config.bonus.enabled);
        }
        case DeciderKind::kMnl:
            return std::make_unique<MnlDecider>(config.decider.alpha);
        case DeciderKind::kPrc:
            return std::make_unique<PrcDecider>();
        case DeciderKind::kRandom:
            return std::make_unique<RandomDecider>();
        case DeciderKind::kMock:
            return std::make_unique<MockDecider>(config.decider.mock_mode,
                                                 config.decider.mock_epsilon);
    }
    throw ConfigError("unhandled decider kind");
}

}  // namespace dtdsim
