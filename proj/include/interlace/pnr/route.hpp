#pragma once

#include "interlace/ir/graph.hpp"
#include "interlace/pnr/app.hpp"
#include "interlace/pnr/place.hpp"
#include "interlace/pnr/timing.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace interlace::pnr {

struct RouteParams {
    int max_iterations = 50;
    double present_factor = 0.5; // first iteration
    double present_growth = 1.5; // per iteration
    double history_increment = 0.5;
    double criticality_exponent = 1.0;
    double max_criticality = 0.99;
    // Added to the base cost of a node in a tile that holds no instance and
    // no routed wire yet.
    double unused_tile_penalty = 0.2;
    bool allow_registers = false; // route through pipeline register nodes
};

// crit * delay + (1 - crit) * base * (1 + history) * (1 + present)
double edge_cost(double delay, double crit, double history, double present, double base);

// Cost of entering a node; infinity marks a node that may not be used.
using NodeCost = std::function<double(ir::NodeId)>;
// Lower bound on the remaining cost from a node to the target.
using Heuristic = std::function<double(ir::NodeId)>;

struct Path {
    std::vector<ir::NodeId> nodes; // from the reached source to the target
    double cost = 0;               // sum of entered node costs
};

// Best path from any of `sources` (cost 0 each) to `target`. Ties break
// towards lower node ids. Throws Unreachable.
Path astar(const ir::RoutingGraph &g, const std::vector<ir::NodeId> &sources,
           ir::NodeId target, const NodeCost &cost, const Heuristic &h);
// Same with a starting cost per source; Path::cost includes it.
Path astar(const ir::RoutingGraph &g, const std::vector<std::pair<ir::NodeId, double>> &seeds,
           ir::NodeId target, const NodeCost &cost, const Heuristic &h);
Path dijkstra(const ir::RoutingGraph &g, const std::vector<ir::NodeId> &sources,
              ir::NodeId target, const NodeCost &cost);

// Longest tile distance covered by a single edge.
int max_edge_span(const ir::RoutingGraph &g);

// Manhattan tile distance to `target` divided by the longest edge span, times
// `per_hop`. Admissible whenever every tile-crossing edge enters a node
// costing at least `per_hop`. A negative span is computed from the graph.
Heuristic manhattan_heuristic(const ir::RoutingGraph &g, ir::NodeId target, double per_hop,
                              int span = -1);

// Smallest delay among nodes entered by a tile-crossing edge.
double min_crossing_delay(const ir::RoutingGraph &g);

struct NetTerminals {
    std::string net;
    ir::NodeId source;
    std::vector<PortRef> sink_pins;
    std::vector<ir::NodeId> sinks;
};

// Port nodes of every net at the placed tiles. Throws UnplacedPin, or
// UnknownNode when a tile lacks the port.
std::vector<NetTerminals> net_terminals(const ir::RoutingGraph &g, const PackedGraph &p,
                                        const Placement &placement);

struct RouteTree {
    std::string net;
    ir::NodeId source;
    std::vector<ir::NodeId> sinks;
    // Each branch starts at a node already in the tree and ends at a sink.
    std::vector<std::vector<ir::NodeId>> branches;

    std::set<ir::NodeId> nodes() const;
    std::map<ir::NodeId, ir::NodeId> parents() const;
    // Source-to-sink node sequence; empty when the sink is not reached.
    std::vector<ir::NodeId> path_to(ir::NodeId sink) const;
};

using RouteSet = std::map<std::string, RouteTree>;

// Post-route delay: sum of node delays on the tree path, source excluded.
SinkDelay routed_delay(const ir::RoutingGraph &g, const RouteSet &routes,
                       const std::vector<NetTerminals> &terms);

struct RouteResult {
    RouteSet routes;
    TimingInfo timing;
    int iterations = 0;
    std::vector<int> overuse; // total overuse after each iteration
};

// Negotiated-congestion routing with timing-driven costs. Throws
// UnroutableSink when a sink cannot be reached even on an empty fabric and
// RoutingFailed when congestion persists after max_iterations.
RouteResult route(const ir::RoutingGraph &g, const PackedGraph &p, const Placement &placement,
                  const RouteParams &params = {});

// Legality problems: missing edges, broken trees, unreached sinks and nodes
// shared between nets. Empty when the route set is legal.
std::vector<std::string> check_routes(const ir::RoutingGraph &g, const RouteSet &routes,
                                      const std::vector<NetTerminals> &terms);

// Tile crossings of a routed tree.
int routed_wirelength(const ir::RoutingGraph &g, const RouteTree &t);

// Text format:
//   route <net>
//     <node id> <node id> ...   (one branch per indented line)
std::string format_routes(const RouteSet &routes);
RouteSet parse_routes(std::string_view text);

} // namespace interlace::pnr
