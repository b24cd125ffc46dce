#include "dtdsim/routeset.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

#include "dtdsim/error.hpp"

namespace dtdsim {
namespace {

struct Path {
    double cost = 0.0;
    std::vector<int> link_ids;
    std::vector<int> node_seq;  // includes origin and destination
};

// Total order used everywhere: (cost, lexicographic link-id sequence).
bool path_less(const Path& a, const Path& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.link_ids < b.link_ids;
}

// Deterministic shortest path on free-flow times that, among all minimum-cost
// paths, returns the lexicographically smallest link-id sequence. Label
// correcting with the full (cost, sequence) order; the networks involved are
// small so keeping sequences in the labels is fine.
std::optional<Path> shortest_path(const Network& net, int src, int dst,
                                  const std::set<int>& banned_links,
                                  const std::set<int>& banned_nodes) {
    struct Label {
        double cost = std::numeric_limits<double>::infinity();
        std::vector<int> links;
        bool reached = false;
    };
    std::map<int, Label> labels;
    labels[src] = {0.0, {}, true};

    bool changed = true;
    while (changed) {
        changed = false;
        // Deterministic sweep over links in id order via the network's link list.
        for (const Link& l : net.links()) {
            if (banned_links.count(l.id)) continue;
            if (banned_nodes.count(l.from) || banned_nodes.count(l.to)) continue;
            auto from_it = labels.find(l.from);
            if (from_it == labels.end() || !from_it->second.reached) continue;
            Label candidate;
            candidate.cost = from_it->second.cost + l.free_flow_time;
            candidate.links = from_it->second.links;
            candidate.links.push_back(l.id);
            candidate.reached = true;
            Label& cur = labels[l.to];
            if (!cur.reached || candidate.cost < cur.cost ||
                (candidate.cost == cur.cost && candidate.links < cur.links)) {
                cur = std::move(candidate);
                changed = true;
            }
        }
    }

    auto it = labels.find(dst);
    if (it == labels.end() || !it->second.reached) return std::nullopt;

    Path p;
    p.cost = it->second.cost;
    p.link_ids = it->second.links;
    p.node_seq.push_back(src);
    for (int id : p.link_ids) p.node_seq.push_back(net.link_by_id(id).to);
    return p;
}

}  // namespace

RouteSet k_shortest_routes(const Network& network, int origin, int destination, int k) {
    if (!network.has_node(origin) || !network.has_node(destination)) {
        throw ConfigError("k_shortest_routes: unknown node in OD " +
                          od_key({origin, destination}));
    }
    if (k < 1) throw ConfigError("k_shortest_routes: k must be >= 1");

    auto first = shortest_path(network, origin, destination, {}, {});
    if (!first) {
        throw SimError("k_shortest_routes: destination unreachable for OD " +
                       od_key({origin, destination}));
    }

    std::vector<Path> selected{*first};
    // Candidate pool ordered by (cost, link sequence); the sequence also
    // deduplicates candidates discovered from different spur points.
    auto cmp = [](const Path& a, const Path& b) { return path_less(a, b); };
    std::set<Path, decltype(cmp)> candidates(cmp);

    while (static_cast<int>(selected.size()) < k) {
        const Path& prev = selected.back();
        // Spur from every node of the previously selected path except the last.
        for (std::size_t i = 0; i + 1 < prev.node_seq.size(); ++i) {
            const int spur_node = prev.node_seq[i];
            std::vector<int> root_links(prev.link_ids.begin(), prev.link_ids.begin() + i);

            std::set<int> banned_links;
            for (const Path& p : selected) {
                if (p.link_ids.size() >= i &&
                    std::equal(root_links.begin(), root_links.end(), p.link_ids.begin())) {
                    if (p.link_ids.size() > i) banned_links.insert(p.link_ids[i]);
                }
            }
            std::set<int> banned_nodes(prev.node_seq.begin(), prev.node_seq.begin() + i);

            auto spur = shortest_path(network, spur_node, destination, banned_links,
                                      banned_nodes);
            if (!spur) continue;

            Path total;
            total.link_ids = root_links;
            total.link_ids.insert(total.link_ids.end(), spur->link_ids.begin(),
                                  spur->link_ids.end());
            total.cost = 0.0;
            for (int id : total.link_ids) total.cost += network.link_by_id(id).free_flow_time;
            total.node_seq.assign(prev.node_seq.begin(), prev.node_seq.begin() + i + 1);
            total.node_seq.insert(total.node_seq.end(), spur->node_seq.begin() + 1,
                                  spur->node_seq.end());
            candidates.insert(std::move(total));
        }

        // Drop candidates equal to an already selected path.
        while (!candidates.empty()) {
            const Path& best = *candidates.begin();
            bool duplicate = std::any_of(selected.begin(), selected.end(),
                                         [&](const Path& p) { return p.link_ids == best.link_ids; });
            if (!duplicate) break;
            candidates.erase(candidates.begin());
        }
        if (candidates.empty()) break;  // graph exhausted
        selected.push_back(*candidates.begin());
        candidates.erase(candidates.begin());
    }

    RouteSet rs;
    rs.od = {origin, destination};
    rs.k = k;
    for (const Path& p : selected) {
        Route r;
        r.od = rs.od;
        r.link_ids = p.link_ids;
        validate_route(network, r);
        rs.routes.push_back(std::move(r));
    }
    return rs;
}

}  // namespace dtdsim
