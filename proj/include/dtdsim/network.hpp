#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dtdsim {

using OdPair = std::pair<int, int>;  // (origin node, destination node)

/// Directed link with a linear performance function tt = t0 + slope * flow.
struct Link {
    int id = 0;
    int from = 0;
    int to = 0;
    double free_flow_time = 0.0;  // minutes
    double slope = 0.0;           // minutes per unit flow
};

/// Travel time of one link under the given flow.
double link_cost(const Link& link, double flow);

/// Immutable directed road network. Nodes are integer ids; adjacency is an
/// outgoing-link index per node. Construction validates all invariants.
class Network {
public:
    Network(std::vector<int> nodes, std::vector<Link> links);

    const std::vector<int>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }

    bool has_node(int node) const { return node_index_.count(node) > 0; }
    const Link& link_by_id(int id) const;
    bool has_link(int id) const { return link_by_id_.count(id) > 0; }

    /// Outgoing links of a node (indices into links()).
    const std::vector<int>& outgoing(int node) const;

    /// Parse the line-oriented text format:
    ///   nodes N
    ///   id from to t0 slope     (one line per directed link)
    /// '#' starts a comment. Nodes are 1..N.
    static Network parse(std::istream& in, const std::string& origin_hint = "");
    static Network load_file(const std::string& path);

private:
    std::vector<int> nodes_;
    std::vector<Link> links_;
    std::map<int, int> node_index_;            // node id -> index
    std::map<int, int> link_by_id_;            // link id -> index into links_
    std::map<int, std::vector<int>> adjacency_;  // node id -> outgoing link indices
};

/// Loop-free route: an ordered link sequence from od.first to od.second.
struct Route {
    OdPair od;
    std::vector<int> link_ids;
};

/// Validate the Route invariants against a network (connectivity, endpoints,
/// no repeated node). Throws ConfigError on violation.
void validate_route(const Network& net, const Route& route);

/// Free-flow travel time of a route.
double route_free_flow_time(const Network& net, const Route& route);

/// Ordered menu of k loop-free routes for one OD pair.
struct RouteSet {
    OdPair od;
    std::vector<Route> routes;  // ascending free-flow cost
    int k = 0;                  // requested count; routes.size() <= k
};

using RouteSetMap = std::map<OdPair, RouteSet>;
using RouteFlows = std::map<OdPair, std::vector<double>>;  // per OD, per route index

/// Result of loading the network with one day's route flows.
struct LoadResult {
    std::map<int, double> link_flows;  // link id -> flow
    std::map<int, double> link_times;  // link id -> minutes
    RouteFlows route_times;            // (od, route index) -> minutes
};

/// Accumulate route flows onto links, evaluate link performance functions and
/// sum them back into route times. Pure: callers may share inputs freely.
/// Route times are computed for every route in route_sets, also those with
/// zero flow (agents perceive unchosen alternatives too).
LoadResult load_network(const Network& network, const RouteFlows& route_flows,
                        const RouteSetMap& route_sets);

/// Sum of link times over a route. Throws SimError when a link is missing.
double route_time(const Route& route, const std::map<int, double>& link_times);

std::string od_key(const OdPair& od);

/// Inverse of od_key ("1->12" -> {1, 12}); throws SimError on malformed keys.
OdPair od_from_key(const std::string& key);

}  // namespace dtdsim
