#pragma once

#include "interlace/ir/graph.hpp"
#include "interlace/pnr/app.hpp"
#include "interlace/pnr/place.hpp"

#include <functional>
#include <map>
#include <string>

namespace interlace::pnr {

// Delay of the net from its source to one sink pin.
using SinkDelay = std::function<double(const AppNet &, const PortRef &sink)>;

struct TimingInfo {
    double critical_path = 0;
    // Per instance: arrival time at its outputs and the latest required time
    // that keeps every endpoint within critical_path.
    std::map<std::string, double> arrival;
    std::map<std::string, double> required;
    std::map<std::string, double> net_slack;       // by net name
    std::map<std::string, double> net_criticality; // 1 - slack / critical_path
};

// Core delay of every instance at its placed tile; unabsorbed registers are
// pass-throughs with zero delay.
std::map<std::string, double> instance_delays(const ir::RoutingGraph &g, const PackedGraph &p,
                                              const Placement &placement);

// True when timing paths stop at this input: REG and MEM inputs, IO inputs
// (design outputs) and PE inputs carrying an absorbed register.
bool is_timing_endpoint(const PackedGraph &p, const PortRef &sink);

// Longest-path analysis. Outputs of IO, REG and MEM instances start paths.
// Criticality is clamped to [0, max_criticality]. Throws CombinationalLoop.
TimingInfo sta(const PackedGraph &p, const std::map<std::string, double> &inst_delay,
               const SinkDelay &delay, double max_criticality = 0.99);

// Pre-route estimate: Manhattan distance between the placed pins times the
// delay of one tile hop.
SinkDelay manhattan_delay(const Placement &placement, double hop_delay);

} // namespace interlace::pnr
