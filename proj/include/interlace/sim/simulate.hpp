#pragma once

#include "interlace/ir/graph.hpp"
#include "interlace/rtl/netlist.hpp"
#include "interlace/sim/bitstream.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace interlace::sim {

struct Arrival {
    uint64_t token = 0;
    int tick = 0; // registers passed
    friend bool operator==(const Arrival &, const Arrival &) = default;
};

// Token propagation: a node with one input forwards it, a mux forwards only
// its selected input, a register adds one tick. Nodes no token reaches are
// absent.
std::map<ir::NodeId, Arrival> functional_sim(const ConfiguredFabric &f,
                                             const std::map<ir::NodeId, uint64_t> &stimulus);

struct SweepFailure {
    ir::NodeId src;
    ir::NodeId dst;
    std::string reason;
};

struct SweepReport {
    size_t cases = 0;
    std::vector<SweepFailure> failures;
    bool pass() const { return failures.empty(); }
};

// For every edge (a, b): writes a select-a-at-b bitstream through the
// `sidecar` map, decodes it through the `hardware` map, injects a token at a
// and expects it at b.
SweepReport exhaustive_sweep(const ir::RoutingGraph &g,
                             const std::vector<rtl::ConfigField> &sidecar,
                             const std::vector<rtl::ConfigField> &hardware);
// Sidecar is the lowering's own map, hardware is the one recovered from the
// netlist structure.
SweepReport exhaustive_sweep(const ir::RoutingGraph &g, const rtl::StructNetlist &n);

std::string format_sweep_report(const ir::RoutingGraph &g, const SweepReport &r);

// Token stream through a chain of FIFO stages with the given depths (a
// full2 register is one depth-2 stage, a split pair is two depth-1 stages
// sharing control). The source offers a new token every cycle; the sink
// accepts when ready[cycle % ready.size()] holds.
struct StreamResult {
    std::vector<uint64_t> delivered; // in arrival order
    std::vector<int> max_occupancy;  // per stage
    int cycles = 0;
};

StreamResult simulate_stream(const std::vector<int> &stage_depths, int tokens,
                             const std::vector<bool> &ready, int max_cycles);

} // namespace interlace::sim
