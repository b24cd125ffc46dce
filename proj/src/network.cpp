#include "dtdsim/network.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dtdsim/error.hpp"

namespace dtdsim {

double link_cost(const Link& link, double flow) {
    if (flow < 0.0) {
        throw SimError("link_cost: negative flow " + std::to_string(flow) +
                       " on link " + std::to_string(link.id));
    }
    return link.free_flow_time + link.slope * flow;
}

Network::Network(std::vector<int> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!node_index_.emplace(nodes_[i], static_cast<int>(i)).second) {
            throw ConfigError("network: duplicate node id " + std::to_string(nodes_[i]));
        }
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const Link& l = links_[i];
        if (l.from == l.to) {
            throw ConfigError("network: link " + std::to_string(l.id) + " is a self-loop");
        }
        if (l.free_flow_time < 0.0 || l.slope < 0.0) {
            throw ConfigError("network: link " + std::to_string(l.id) +
                              " has negative free-flow time or slope");
        }
        if (!node_index_.count(l.from) || !node_index_.count(l.to)) {
            throw ConfigError("network: link " + std::to_string(l.id) +
                              " references undeclared node");
        }
        if (!link_by_id_.emplace(l.id, static_cast<int>(i)).second) {
            throw ConfigError("network: duplicate link id " + std::to_string(l.id));
        }
        adjacency_[l.from].push_back(static_cast<int>(i));
    }
}

const Link& Network::link_by_id(int id) const {
    auto it = link_by_id_.find(id);
    if (it == link_by_id_.end()) {
        throw SimError("network: unknown link id " + std::to_string(id));
    }
    return links_[it->second];
}

const std::vector<int>& Network::outgoing(int node) const {
    static const std::vector<int> kEmpty;
    auto it = adjacency_.find(node);
    return it == adjacency_.end() ? kEmpty : it->second;
}

Network Network::parse(std::istream& in, const std::string& origin_hint) {
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError("network file" +
                          (origin_hint.empty() ? std::string() : " " + origin_hint) + ": " + msg);
    };

    std::string line;
    int node_count = -1;
    std::vector<Link> links;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;  // blank or comment-only line
        if (node_count < 0) {
            if (first != "nodes") fail("expected 'nodes N' header, got '" + first + "'");
            if (!(ls >> node_count) || node_count <= 0) fail("bad node count");
            continue;
        }
        Link l;
        l.id = std::stoi(first);
        if (!(ls >> l.from >> l.to >> l.free_flow_time >> l.slope)) {
            fail("line " + std::to_string(line_no) + ": expected 'id from to t0 slope'");
        }
        links.push_back(l);
    }
    if (node_count < 0) fail("missing 'nodes N' header");

    std::vector<int> nodes(node_count);
    for (int i = 0; i < node_count; ++i) nodes[i] = i + 1;
    return Network(std::move(nodes), std::move(links));
}

Network Network::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network file: " + path);
    return parse(in, path);
}

void validate_route(const Network& net, const Route& route) {
    if (route.link_ids.empty()) {
        throw ConfigError("route for " + od_key(route.od) + " has no links");
    }
    std::set<int> seen_nodes;
    int at = route.od.first;
    seen_nodes.insert(at);
    for (int id : route.link_ids) {
        const Link& l = net.link_by_id(id);
        if (l.from != at) {
            throw ConfigError("route for " + od_key(route.od) + ": link " +
                              std::to_string(id) + " does not continue from node " +
                              std::to_string(at));
        }
        at = l.to;
        if (!seen_nodes.insert(at).second) {
            throw ConfigError("route for " + od_key(route.od) + " revisits node " +
                              std::to_string(at));
        }
    }
    if (at != route.od.second) {
        throw ConfigError("route for " + od_key(route.od) + " ends at node " +
                          std::to_string(at));
    }
}

double route_free_flow_time(const Network& net, const Route& route) {
    double total = 0.0;
    for (int id : route.link_ids) total += net.link_by_id(id).free_flow_time;
    return total;
}

LoadResult load_network(const Network& network, const RouteFlows& route_flows,
                        const RouteSetMap& route_sets) {
    LoadResult result;
    for (const Link& l : network.links()) result.link_flows[l.id] = 0.0;

    for (const auto& [od, flows] : route_flows) {
        auto rs = route_sets.find(od);
        if (rs == route_sets.end()) {
            throw SimError("load_network: flow on OD " + od_key(od) + " with no route set");
        }
        if (flows.size() > rs->second.routes.size()) {
            throw SimError("load_network: " + std::to_string(flows.size()) +
                           " flows for OD " + od_key(od) + " but only " +
                           std::to_string(rs->second.routes.size()) + " routes");
        }
        for (std::size_t r = 0; r < flows.size(); ++r) {
            if (flows[r] < 0.0) {
                throw SimError("load_network: negative flow on OD " + od_key(od) +
                               " route " + std::to_string(r));
            }
            for (int id : rs->second.routes[r].link_ids) {
                result.link_flows[id] += flows[r];
            }
        }
    }

    for (const Link& l : network.links()) {
        result.link_times[l.id] = link_cost(l, result.link_flows[l.id]);
    }
    for (const auto& [od, rs] : route_sets) {
        std::vector<double> times;
        times.reserve(rs.routes.size());
        for (const Route& route : rs.routes) {
            times.push_back(route_time(route, result.link_times));
        }
        result.route_times[od] = std::move(times);
    }
    return result;
}

double route_time(const Route& route, const std::map<int, double>& link_times) {
    double total = 0.0;
    for (int id : route.link_ids) {
        auto it = link_times.find(id);
        if (it == link_times.end()) {
            throw SimError("route_time: no time for link " + std::to_string(id));
        }
        total += it->second;
    }
    return total;
}

std::string od_key(const OdPair& od) {
    return std::to_string(od.first) + "->" + std::to_string(od.second);
}

OdPair od_from_key(const std::string& key) {
    const auto arrow = key.find("->");
    try {
        if (arrow != std::string::npos) {
            std::size_t used_first = 0;
            std::size_t used_second = 0;
            const std::string head = key.substr(0, arrow);
            const std::string tail = key.substr(arrow + 2);
            const int origin = std::stoi(head, &used_first);
            const int destination = std::stoi(tail, &used_second);
            if (used_first == head.size() && used_second == tail.size())
                return {origin, destination};
        }
    } catch (const std::exception&) {
        // fall through to the shared error below
    }
    throw SimError("malformed OD key: '" + key + "'");
}

}  // namespace dtdsim
