#pragma once

#include "interlace/ir/graph.hpp"
#include "interlace/pnr/app.hpp"
#include "interlace/pnr/place.hpp"
#include "interlace/pnr/route.hpp"
#include "interlace/rtl/netlist.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace interlace::sim {

struct Word {
    uint32_t address = 0;
    uint32_t data = 0;
    friend auto operator<=>(const Word &, const Word &) = default;
};

// Sorted by address, addresses unique.
using Bitstream = std::vector<Word>;

struct FieldValue {
    rtl::ConfigField field;
    uint64_t value = 0;
};

// Mux site and register instance names of the lowering, mapped back to the
// IR nodes they implement.
class FieldIndex {
public:
    FieldIndex(const ir::RoutingGraph &g, const std::vector<rtl::ConfigField> &map);

    // Field driving a pin of an instance; nullptr when absent.
    const rtl::ConfigField *find(std::string_view inst, std::string_view pin) const;
    const rtl::ConfigField *select_of(ir::NodeId mux) const;
    const std::vector<rtl::ConfigField> &fields() const { return fields_; }
    const ir::RoutingGraph &graph() const { return *g_; }

    // IR node implemented by a mux or register instance.
    std::optional<ir::NodeId> node_of(std::string_view inst) const;
    bool known_address(uint32_t address) const { return addresses_.count(address) > 0; }

private:
    const ir::RoutingGraph *g_;
    std::vector<rtl::ConfigField> fields_;
    std::map<std::pair<std::string, std::string>, size_t> by_pin_;
    std::map<std::string, ir::NodeId> nodes_;
    std::set<uint32_t> addresses_;
};

// Routing-tree selection function: for every multi-input node on a tree, the
// fan-in index of its parent.
std::map<ir::NodeId, int> tree_selections(const ir::RoutingGraph &g, const pnr::RouteSet &routes);

struct BitstreamOptions {
    bool include_defaults = false; // emit every configured word, zero or not
    // Registers on a route run as FIFOs (ready-valid fabrics only).
    bool fifo_enable = true;
    int split_chain_depth = 2;
};

// Field assignments for routed muxes, registers on routes and core operand
// configuration. Throws FieldConflict when two nets claim one mux and
// UnknownField when the map lacks a needed field.
std::vector<FieldValue> route_assignments(const ir::RoutingGraph &g, const FieldIndex &index,
                                          const pnr::RouteSet &routes,
                                          const pnr::PackedGraph &packed,
                                          const pnr::Placement &placement,
                                          const BitstreamOptions &options = {});

// Packs assignments into words. Throws FieldConflict when two assignments
// give one field different values.
Bitstream pack_words(const std::vector<FieldValue> &values, const FieldIndex &index,
                     bool include_defaults);

Bitstream generate_bitstream(const ir::RoutingGraph &g, const std::vector<rtl::ConfigField> &map,
                             const pnr::RouteSet &routes, const pnr::PackedGraph &packed,
                             const pnr::Placement &placement,
                             const BitstreamOptions &options = {});

struct ConfiguredFabric {
    const ir::RoutingGraph *graph = nullptr;
    std::map<ir::NodeId, int> select; // every mux site
    std::map<ir::NodeId, int> fifo_mode;
    std::map<ir::NodeId, int> fifo_role;
    // (x, y) -> core config pin -> value
    std::map<std::pair<int, int>, std::map<std::string, uint64_t>> core;
};

// Decodes a bitstream. Missing words read as zero. Throws BadAddress for an
// address outside the map and SelectOutOfRange for a select >= fan-in.
ConfiguredFabric configure(const ir::RoutingGraph &g, const std::vector<rtl::ConfigField> &map,
                           const Bitstream &b);
ConfiguredFabric configure(const FieldIndex &index, const Bitstream &b);

// One `AAAAAAAA DDDDDDDD` line per word, uppercase hex.
std::string format_bitstream(const Bitstream &b);
Bitstream parse_bitstream(std::string_view text);

} // namespace interlace::sim
