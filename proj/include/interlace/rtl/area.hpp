#pragma once

#include "interlace/rtl/netlist.hpp"

namespace interlace::rtl {

// Gate-equivalent weight of one storage bit.
inline constexpr long long kRegisterGateWeight = 4;

struct AreaBreakdown {
    long long mux_inputs = 0;     // sum of K over muxes
    long long mux_input_bits = 0; // sum of K * W
    long long config_bits = 0;
    long long gate_estimate = 0;
};

struct AreaMetrics {
    long long mux_input_count = 0; // sum of K * W over all muxes
    long long config_bits = 0;
    long long storage_bits = 0;    // REG and FIFO_REG data/state bits
    long long join_gates = 0;      // 2N - 1 per N-input ready join
    long long gate_count_estimate = 0;
    AreaBreakdown sb; // switch boxes, including register bypass muxes
    AreaBreakdown cb; // connection boxes (core input muxes)
};

// Storage of one register primitive: REG w; split FIFO_REG w + 1 (one slot
// plus its valid bit, control shared with the neighbour); depth-2 FIFO_REG
// 2w + 2 (two slots plus read/write pointers).
long long storage_bits(const Instance &inst);

// gate_count_estimate = mux_input_count
//     + (storage_bits + config_bits) * kRegisterGateWeight + join_gates.
// Per-region estimates use mux_input_bits + config_bits * kRegisterGateWeight.
AreaMetrics area_proxy(const StructNetlist &n);

} // namespace interlace::rtl
