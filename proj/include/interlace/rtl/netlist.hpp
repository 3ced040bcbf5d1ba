#pragma once

#include "interlace/ir/graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace interlace::rtl {

enum class Prim { Mux, Reg, FifoReg, CfgReg, Core, Const, Join };

// Verilog type name: MUX, REG, FIFO_REG, CFG_REG, CORE_<core>, CONST, RDY_JOIN.
std::string prim_type_name(Prim p, std::string_view core = {});
std::optional<Prim> parse_prim_type(std::string_view type, std::string &core);

struct PinRef {
    std::string wire;
    int hi = -1; // slice [hi:lo]; -1 when the whole wire is connected
    int lo = -1;

    bool sliced() const { return hi >= 0; }
    int width_or(int whole) const { return sliced() ? hi - lo + 1 : whole; }
    friend bool operator==(const PinRef &, const PinRef &) = default;
    friend auto operator<=>(const PinRef &, const PinRef &) = default;
};

struct Pin {
    std::string name;
    PinRef ref;
    friend bool operator==(const Pin &, const Pin &) = default;
    friend auto operator<=>(const Pin &, const Pin &) = default;
};

struct Instance {
    std::string name;
    Prim prim = Prim::Const;
    std::string core; // Prim::Core only
    std::map<std::string, long long> params; // always includes X and Y
    std::vector<Pin> pins;

    const PinRef *pin(std::string_view pin_name) const;
    long long param(std::string_view key, long long fallback = 0) const;
    int x() const { return static_cast<int>(param("X")); }
    int y() const { return static_cast<int>(param("Y")); }
    friend bool operator==(const Instance &, const Instance &) = default;
};

// Output pins by primitive; everything else is an input.
bool pin_is_output(const Instance &inst, std::string_view pin_name);

struct Wire {
    std::string name;
    int width = 1;
    friend bool operator==(const Wire &, const Wire &) = default;
    friend auto operator<=>(const Wire &, const Wire &) = default;
};

// `assign lhs = rhs;` inside tile (x, y). A fan-in-1 IR edge lowers to this.
struct Assign {
    std::string lhs;
    PinRef rhs;
    int x = 0;
    int y = 0;
    friend bool operator==(const Assign &, const Assign &) = default;
    friend auto operator<=>(const Assign &, const Assign &) = default;
};

enum class FieldMeaning { MuxSelect, FifoMode, SplitFifoRole, CoreConfig };

std::string_view meaning_name(FieldMeaning m);

struct ConfigField {
    int x = 0;
    int y = 0;
    int feature = 0;
    int reg = 0;
    int bit_offset = 0;
    int bit_width = 1;
    FieldMeaning meaning = FieldMeaning::MuxSelect;
    std::string target_inst;
    std::string target_pin;

    // Packed (x:8, y:8, feature:8, reg:8).
    uint32_t address() const;
    friend bool operator==(const ConfigField &, const ConfigField &) = default;
};

uint32_t pack_address(int x, int y, int feature, int reg);
struct DecodedAddress {
    int x, y, feature, reg;
};
DecodedAddress unpack_address(uint32_t address);

inline constexpr int kConfigWordBits = 32;

struct StructNetlist {
    std::vector<Wire> wires;
    std::vector<Instance> instances;
    std::vector<Assign> assigns;
    std::vector<ConfigField> config;
    std::vector<std::string> diagnostics;

    const Instance *find_instance(std::string_view name) const;
    const Wire *find_wire(std::string_view name) const;

    // Same instance multiset (name, primitive, params, pins), wires and
    // assigns. Configuration sidecar and diagnostics are not compared.
    bool structurally_equal(const StructNetlist &other) const;
};

// One driver and its sinks, derived from instance pins and assigns.
struct Endpoint {
    std::string inst; // empty for an assign
    std::string pin;  // pin name, or the assigned wire for an assign
    friend bool operator==(const Endpoint &, const Endpoint &) = default;
};

struct WireConnectivity {
    std::string wire;
    std::vector<Endpoint> drivers;
    std::vector<Endpoint> sinks;
};

std::vector<WireConnectivity> wire_table(const StructNetlist &n);

// Invariant violations: wires without exactly one driver, mux arity/select
// width mismatches, duplicate names, overlapping config fields.
std::vector<std::string> check_netlist(const StructNetlist &n);

// Naming scheme shared by lowering, verification and bitstream generation.
std::string data_wire(const ir::IrNode &n);
std::string valid_wire(const ir::IrNode &n);
std::string mux_instance(const ir::IrNode &n);
std::string reg_instance(const ir::IrNode &n);
std::string core_instance(int x, int y);
std::string cfg_instance(int x, int y, int feature, int reg);

int select_width(int k); // ceil(log2 k), 0 for k <= 1

enum class FifoMode { Full2, Split };

std::string_view fifo_mode_name(FifoMode m);

struct ReadyValidOptions {
    FifoMode fifo = FifoMode::Split;
    int split_chain_depth = 2;
};

// Static mesh lowering: multi-fan-in nodes become muxes with a select field,
// fan-in-1 edges become assigns, registers become REG, unused mux sites are
// tied to constant zero. Throws InvalidGraph when g does not validate.
StructNetlist lower_static(const ir::RoutingGraph &g);

// Statically configured ready-valid lowering. Adds a 1-bit valid network
// that mirrors the data network and shares its selects, a reverse ready
// network joined with the data muxes' one-hot selects, and FIFO registers.
StructNetlist lower_ready_valid(const ir::RoutingGraph &g,
                                const ReadyValidOptions &options = {});

// Config fields recovered from the structure: every pin wired to a slice of
// a CFG_REG output.
std::vector<ConfigField> extract_config_map(const StructNetlist &n);

std::string format_config_map(const std::vector<ConfigField> &fields);
std::vector<ConfigField> parse_config_map(std::string_view text);

} // namespace interlace::rtl
