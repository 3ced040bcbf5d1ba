#pragma once

#include "interlace/ir/graph.hpp"
#include "interlace/rtl/netlist.hpp"

#include <string>
#include <vector>

namespace interlace::rtl {

enum class FindingKind {
    MissingWire,   // IR node without its net
    ExtraWire,     // net named after a node that is not in the IR
    Undriven,      // net without a driver
    MissingEdge,   // IR edge without a matching mux input / assign / register input
    ExtraEdge,     // hardware input without an IR edge
    WrongInput,    // mux input i connected to a different node than fan_in[i]
    KindMismatch,  // e.g. a mux where the IR has fan-in 1
    SelectMismatch // valid mux select differs from its data mux select
};

std::string_view finding_name(FindingKind k);

struct Finding {
    FindingKind kind;
    std::string subject;
    std::string detail;
};

struct Report {
    std::vector<Finding> findings;
    size_t nodes_checked = 0;
    size_t edges_checked = 0;

    bool pass() const { return findings.empty(); }
    size_t count(FindingKind k) const;
};

// Rebuilds each IR node's ordered predecessor list from the netlist data
// path (mux input index, assign, register input) and compares it with
// fan_in in the IR.
Report verify_structure(const ir::RoutingGraph &g, const StructNetlist &n);

// Same comparison on the 1-bit valid network of a ready-valid netlist, plus
// a check that each valid mux shares its data mux's select bits.
Report verify_valid_mirror(const ir::RoutingGraph &g, const StructNetlist &n);

std::string format_report(const Report &r);

} // namespace interlace::rtl
