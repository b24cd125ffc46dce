#pragma once

#include "dtdsim/network.hpp"

namespace dtdsim {

/// The k loop-free routes with smallest free-flow travel time, ascending, with
/// ties broken by lexicographic link-id order. Yen's algorithm over a
/// deterministic shortest-path subroutine; returns fewer than k routes when the
/// graph has fewer simple paths. Throws SimError when destination is
/// unreachable.
RouteSet k_shortest_routes(const Network& network, int origin, int destination, int k);

}  // namespace dtdsim
