#pragma once

#include <map>

#include "dtdsim/network.hpp"

namespace dtdsim {

/// Linear two-route cost function parameters (t0, sigma).
struct RouteCostParams {
    double t0 = 0.0;
    double sigma = 0.0;
};

struct DueSolution {
    RouteFlows route_flows;                 // per OD, per route index
    RouteFlows route_costs;                 // minutes, same shape
    double max_cost_gap = 0.0;              // max over ODs: max used cost - min cost
    bool converged = true;
    int iterations = 0;
    double relative_gap = 0.0;
    double mean_travel_time = 0.0;          // demand-weighted over all travelers
};

/// Closed-form user equilibrium of a two-route network with linear costs:
/// solves t01 + s1*f1 = t02 + s2*(demand - f1), clamping f1 to [0, demand].
/// On a boundary solution one route is unused and max_cost_gap is positive.
DueSolution two_route_due(const RouteCostParams& c1, const RouteCostParams& c2,
                          double demand);

struct MsaConfig {
    int max_iterations = 2000000;
    double relative_gap_tolerance = 1e-6;
};

/// Method of successive averages over fixed route sets: all-or-nothing
/// assignment to each OD's currently cheapest route, averaged with step 1/k,
/// until the relative gap
///   sum_od demand*(avg used cost - min cost) / sum_od demand*min cost
/// drops below tolerance. Non-convergence is reported, not thrown.
DueSolution msa_ue(const Network& network, const RouteSetMap& route_sets,
                   const std::map<OdPair, double>& demands, const MsaConfig& config);

}  // namespace dtdsim
