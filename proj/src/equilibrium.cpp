#include "dtdsim/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "dtdsim/error.hpp"

namespace dtdsim {

DueSolution two_route_due(const RouteCostParams& c1, const RouteCostParams& c2,
                          double demand) {
    if (demand <= 0.0) throw ConfigError("two_route_due: demand must be positive");
    if (c1.sigma + c2.sigma <= 0.0) {
        throw ConfigError("two_route_due: sigma1 + sigma2 must be positive");
    }
    double f1 = (c2.t0 - c1.t0 + c2.sigma * demand) / (c1.sigma + c2.sigma);
    f1 = std::clamp(f1, 0.0, demand);
    const double f2 = demand - f1;
    const double cost1 = c1.t0 + c1.sigma * f1;
    const double cost2 = c2.t0 + c2.sigma * f2;

    DueSolution sol;
    const OdPair od{1, 2};
    sol.route_flows[od] = {f1, f2};
    sol.route_costs[od] = {cost1, cost2};
    const double min_cost = std::min(cost1, cost2);
    double max_used = min_cost;
    if (f1 > 0.0) max_used = std::max(max_used, cost1);
    if (f2 > 0.0) max_used = std::max(max_used, cost2);
    sol.max_cost_gap = max_used - min_cost;
    sol.mean_travel_time = (f1 * cost1 + f2 * cost2) / demand;
    return sol;
}

namespace {

// Flat-index view of the route sets so the MSA loop runs allocation-free.
struct FlatProblem {
    std::vector<double> link_t0;
    std::vector<double> link_slope;
    std::vector<std::vector<std::vector<int>>> route_links;  // [od][route] -> link positions
    std::vector<double> demand;                              // [od]
    std::vector<OdPair> ods;
};

FlatProblem flatten(const Network& network, const RouteSetMap& route_sets,
                    const std::map<OdPair, double>& demands) {
    FlatProblem p;
    std::map<int, int> link_pos;
    for (const Link& l : network.links()) {
        link_pos[l.id] = static_cast<int>(p.link_t0.size());
        p.link_t0.push_back(l.free_flow_time);
        p.link_slope.push_back(l.slope);
    }
    for (const auto& [od, dem] : demands) {
        const RouteSet& rs = route_sets.at(od);
        std::vector<std::vector<int>> routes;
        for (const Route& r : rs.routes) {
            std::vector<int> positions;
            positions.reserve(r.link_ids.size());
            for (int id : r.link_ids) positions.push_back(link_pos.at(id));
            routes.push_back(std::move(positions));
        }
        p.route_links.push_back(std::move(routes));
        p.demand.push_back(dem);
        p.ods.push_back(od);
    }
    return p;
}

}  // namespace

DueSolution msa_ue(const Network& network, const RouteSetMap& route_sets,
                   const std::map<OdPair, double>& demands, const MsaConfig& config) {
    if (config.relative_gap_tolerance <= 0.0) {
        throw ConfigError("msa_ue: tolerance must be positive");
    }
    for (const auto& [od, demand] : demands) {
        auto it = route_sets.find(od);
        if (it == route_sets.end() || it->second.routes.empty()) {
            throw ConfigError("msa_ue: empty route set for OD " + od_key(od));
        }
        if (demand < 0.0) throw ConfigError("msa_ue: negative demand on OD " + od_key(od));
    }

    const FlatProblem p = flatten(network, route_sets, demands);
    const std::size_t n_od = p.ods.size();

    std::vector<std::vector<double>> flows(n_od);
    for (std::size_t o = 0; o < n_od; ++o) flows[o].assign(p.route_links[o].size(), 0.0);

    std::vector<double> link_flow(p.link_t0.size(), 0.0);
    std::vector<double> link_time(p.link_t0.size(), 0.0);
    std::vector<std::size_t> best(n_od, 0);

    double relative_gap = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iteration = 0;
    while (iteration < config.max_iterations) {
        ++iteration;
        std::fill(link_flow.begin(), link_flow.end(), 0.0);
        for (std::size_t o = 0; o < n_od; ++o) {
            for (std::size_t r = 0; r < flows[o].size(); ++r) {
                for (int pos : p.route_links[o][r]) link_flow[pos] += flows[o][r];
            }
        }
        for (std::size_t i = 0; i < link_time.size(); ++i) {
            link_time[i] = p.link_t0[i] + p.link_slope[i] * link_flow[i];
        }

        double gap_num = 0.0;
        double gap_den = 0.0;
        for (std::size_t o = 0; o < n_od; ++o) {
            double min_time = std::numeric_limits<double>::infinity();
            double cost = 0.0;
            for (std::size_t r = 0; r < flows[o].size(); ++r) {
                double t = 0.0;
                for (int pos : p.route_links[o][r]) t += link_time[pos];
                cost += flows[o][r] * t;
                if (t < min_time) {
                    min_time = t;
                    best[o] = r;
                }
            }
            gap_num += cost - p.demand[o] * min_time;
            gap_den += p.demand[o] * min_time;
        }
        relative_gap = gap_den > 0.0 ? gap_num / gap_den : 0.0;
        if (iteration > 1 && relative_gap < config.relative_gap_tolerance) {
            converged = true;
            break;
        }

        const double step = 1.0 / iteration;
        for (std::size_t o = 0; o < n_od; ++o) {
            for (std::size_t r = 0; r < flows[o].size(); ++r) {
                const double target = (r == best[o]) ? p.demand[o] : 0.0;
                flows[o][r] += step * (target - flows[o][r]);
            }
        }
    }

    DueSolution sol;
    sol.converged = converged;
    sol.iterations = iteration;
    sol.relative_gap = relative_gap;

    RouteFlows final_flows;
    for (std::size_t o = 0; o < n_od; ++o) final_flows[p.ods[o]] = flows[o];
    const LoadResult load = load_network(network, final_flows, route_sets);

    double total_cost = 0.0;
    double total_demand = 0.0;
    double max_gap = 0.0;
    sol.route_flows = final_flows;
    for (std::size_t o = 0; o < n_od; ++o) {
        const OdPair od = p.ods[o];
        const auto& times = load.route_times.at(od);
        const auto& f = final_flows.at(od);
        sol.route_costs[od] = times;
        const double min_cost = *std::min_element(times.begin(), times.end());
        double max_used = min_cost;
        for (std::size_t r = 0; r < f.size(); ++r) {
            total_cost += f[r] * times[r];
            if (f[r] > 1e-9 * std::max(p.demand[o], 1.0)) {
                max_used = std::max(max_used, times[r]);
            }
        }
        max_gap = std::max(max_gap, max_used - min_cost);
        total_demand += p.demand[o];
    }
    sol.max_cost_gap = max_gap;
    sol.mean_travel_time = total_demand > 0.0 ? total_cost / total_demand : 0.0;
    return sol;
}

}  // namespace dtdsim
