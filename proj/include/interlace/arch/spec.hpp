#pragma once

#include "interlace/ir/graph.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace interlace::arch {

using ir::Side;

enum class Topology { Wilton, Disjoint };

std::string_view topology_name(Topology t);

struct PortSpec {
    std::string name;
    int bitwidth = 16;
};

struct CoreSpec {
    std::string name;
    std::vector<PortSpec> inputs;
    std::vector<PortSpec> outputs;
    double delay = 0.0;

    // `in=4x16` style shorthand: ports named in0.., out0.. in order.
    static CoreSpec uniform(std::string name, int num_in, int num_out,
                            int bitwidth, double delay);
};

using SideSet = std::set<Side>;

struct PortConnPolicy {
    SideSet cb_sides{Side::North, Side::East, Side::South, Side::West};
    SideSet sb_out_sides{Side::North, Side::East, Side::South, Side::West};
    // Empty means every track of the layer.
    std::set<int> cb_tracks;
    std::set<int> sb_out_tracks;
};

// Sides left after removing `removed` sides, East first and then South.
SideSet sides_after_removal(int removed);

struct LayerSpec {
    int bitwidth = 16;
    int num_tracks = 5;
    Topology topology = Topology::Wilton;
    double reg_density = 0.0; // fraction of (side, track) slots registered
};

struct ArchSpec {
    int width = 8;
    int height = 8;
    std::vector<LayerSpec> layers{LayerSpec{}};
    int mem_column_stride = 4; // 0: no MEM columns
    std::optional<CoreSpec> pe_core = CoreSpec::uniform("pe", 4, 2, 16, 2.0);
    std::optional<CoreSpec> mem_core = CoreSpec::uniform("mem", 2, 1, 16, 1.0);
    std::optional<CoreSpec> io_core = CoreSpec::uniform("io", 1, 1, 16, 0.0);
    PortConnPolicy policy;
    double wire_delay = 1.0; // delay of an SB input node (one tile hop)
    double mux_delay = 0.0;  // SB output, RegMux and CB port nodes
    double reg_delay = 0.0;
};

enum class TileKind { Io, Mem, Pe };

bool is_boundary(const ArchSpec &spec, int x, int y);
bool is_mem_column(const ArchSpec &spec, int x);
TileKind tile_kind(const ArchSpec &spec, int x, int y);
const std::optional<CoreSpec> &tile_core(const ArchSpec &spec, int x, int y);

// Throws InvalidSpec with the first violated invariant.
void check_spec(const ArchSpec &spec);

// INI-like text format; see README. Throws ParseError with line/column.
ArchSpec parse_arch_spec(std::string_view text);
std::string format_arch_spec(const ArchSpec &spec);

} // namespace interlace::arch
