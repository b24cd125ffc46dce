#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dtdsim/agent.hpp"
#include "dtdsim/decider.hpp"
#include "dtdsim/equilibrium.hpp"
#include "dtdsim/llm_client.hpp"
#include "dtdsim/network.hpp"

namespace dtdsim {

enum class DeciderKind { kLlm, kMnl, kPrc, kRandom, kMock };

DeciderKind decider_kind_from_name(const std::string& name);
std::string decider_kind_name(DeciderKind kind);

struct DeciderConfig {
    DeciderKind kind = DeciderKind::kMock;
    double alpha = 1.0;  // logit sensitivity, MNL only
    MockMode mock_mode = MockMode::kArgmin;
    double mock_epsilon = 0.1;
    LlmClientConfig llm;
};

struct BonusConfig {
    bool enabled = true;
    double reference_time = 40.0;   // minutes a trip must beat to earn anything
    double rate_per_minute = 0.02;  // RMB per minute saved
};

struct DemandEntry {
    OdPair od{0, 0};
    int travelers = 0;
};

struct ScenarioConfig {
    std::string name = "scenario1";  // builtin name, or "custom" with network_file
    std::string network_file;        // overrides the builtin network when set
    std::vector<DemandEntry> demands;
    int travelers_per_agent = 1;
    int k_routes = 2;
    int days = 100;
    int runs = 3;
    std::uint64_t seed = 42;
    DeciderConfig decider;
    Feedback feedback = Feedback::kAllRoutes;
    double omega = 0.2;
    bool selfish_profiles = false;
    BonusConfig bonus;
    std::string scenario_text;  // scenario half of the prompt's task description

    void validate() const;  // throws ConfigError
};

/// The five two-route settings plus the 13-node grid ("ow"); each comes with
/// its published demands, feedback mode, and defaults.
ScenarioConfig builtin_scenario(const std::string& name);
const std::vector<std::string>& builtin_scenario_names();

/// Text of the builtin network for `name`, in the network-file format. The
/// grid network's canonical copy is assets/ow_network.txt; a test keeps the
/// embedded copy identical.
std::string builtin_network_text(const std::string& name);

/// Reads a flat `key = value` config file. When a `scenario` key names a
/// builtin, its settings are the base and the remaining keys override it.
/// `demand` lines ("origin destination travelers") are repeatable; the first
/// one replaces the inherited demand list.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config_file(const std::string& path);

/// Canonical snapshot of every field, parseable by parse_config.
void write_config(const ScenarioConfig& config, std::ostream& out);

/// A scenario instantiated and ready to simulate.
struct BuiltScenario {
    ScenarioConfig config;
    Network network;
    RouteSetMap route_sets;
    std::vector<AgentState> agents;
    std::vector<int> agent_units;  // travelers each agent stands for
    std::vector<DemandEntry> demands;

    int total_travelers() const;
    const RouteSet& routes_for(const OdPair& od) const;
};

/// Instantiates network, route sets, and travelers. Profiles are drawn from
/// `agent_seed` (a replication's run seed), so replications get independent
/// travelers. Demand not divisible by travelers_per_agent leaves one smaller
/// remainder agent.
BuiltScenario build_scenario(const ScenarioConfig& config, std::uint64_t agent_seed);

/// Per-route linear cost parameters for an OD whose routes share no links
/// with each other or any other OD (true for the two-route builtins); empty
/// when that structure is absent.
std::optional<std::vector<RouteCostParams>> exclusive_route_params(const BuiltScenario& scenario,
                                                                   const OdPair& od);

/// Constructs the configured decider (LLM kind requires the API key env var
/// to be set unless the transport is mocked elsewhere).
std::unique_ptr<Decider> make_decider(const ScenarioConfig& config);

}  // namespace dtdsim
