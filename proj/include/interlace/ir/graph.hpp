#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

// Directed-graph IR of a CGRA interconnect. Nodes are anything that can be
// connected (switch box tracks, core ports, pipeline registers and their
// bypass muxes); edges are unidirectional wires. A node with several incoming
// edges becomes a multiplexer when lowered to hardware.
namespace interlace::ir {

enum class Side : uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Side, 4> kAllSides = {Side::North, Side::East,
                                                  Side::South, Side::West};

constexpr Side opposite(Side s) {
    return static_cast<Side>((static_cast<int>(s) + 2) % 4);
}

std::string_view side_name(Side s);      // "north", ...
char side_letter(Side s);                // 'N', ...
std::optional<Side> parse_side(std::string_view text); // accepts both forms

enum class NodeKind : uint8_t { SwitchBox, Port, Register, RegMux };
enum class Io : uint8_t { In, Out };

std::string_view kind_name(NodeKind k); // "sb", "port", "reg", "regmux"

struct NodeId {
    uint32_t value = 0;

    friend auto operator<=>(NodeId, NodeId) = default;
};

struct IrNode {
    NodeKind kind = NodeKind::SwitchBox;
    int x = 0;
    int y = 0;
    int bitwidth = 16;
    int track = 0;           // SwitchBox / Register / RegMux
    Side side = Side::North; // SwitchBox / Register / RegMux
    Io io = Io::In;          // SwitchBox
    std::string port_name;   // Port
    double delay = 0.0;

    static IrNode switch_box(int x, int y, Side side, int track, Io io,
                             int bitwidth, double delay = 0.0);
    static IrNode port(int x, int y, std::string name, int bitwidth,
                       double delay = 0.0);
    static IrNode reg(int x, int y, Side side, int track, int bitwidth,
                      double delay = 0.0);
    static IrNode reg_mux(int x, int y, Side side, int track, int bitwidth,
                          double delay = 0.0);
};

// Semantic identity of a node. Fields that do not apply to the node's kind
// are normalized away.
using NodeKey =
    std::tuple<int, int, int, int, int, int, int, std::string>; // bw,y,x,kind,side,track,io,name

NodeKey node_key(const IrNode &n);

// Deterministic, globally unique name of a node, e.g. "sb16_x1_y2_N_t0_out".
std::string node_name(const IrNode &n);

struct Edge {
    NodeId src;
    NodeId dst;
};

// Per-tile core attributes, used by lowering and placement.
struct TileInfo {
    std::string core; // empty: tile has no core
    double core_delay = 0.0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

enum class Rule {
    OutOfBounds,
    UnknownLayer,
    TrackOutOfRange,
    FieldMismatch,
    NegativeDelay,
    DuplicateNode,
    UnknownNode,
    SelfLoop,
    DuplicateEdge,
    LayerMismatch,
    UnknownPort,
};

std::string_view rule_name(Rule r);

struct Diagnostic {
    Rule rule;
    std::string subject;
    std::string message;
};

class RoutingGraph {
public:
    RoutingGraph() = default;
    RoutingGraph(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    void add_layer(int bitwidth, int num_tracks);
    const std::map<int, int> &layers() const { return layers_; }
    int num_tracks(int bitwidth) const;

    void set_tile(int x, int y, TileInfo info);
    const TileInfo *tile(int x, int y) const;
    const std::map<std::pair<int, int>, TileInfo> &tiles() const {
        return tiles_;
    }

    // Idempotent for identical node tuples. Throws OutOfBounds/UnknownLayer.
    NodeId add_node(const IrNode &n);
    // Duplicate insertion is a no-op. Throws UnknownNode/SelfLoop/LayerMismatch.
    void add_edge(NodeId src, NodeId dst);

    size_t num_nodes() const { return nodes_.size(); }
    bool contains(NodeId id) const { return id.value < nodes_.size(); }
    const IrNode &node(NodeId id) const;
    const std::vector<IrNode> &nodes() const { return nodes_; }
    const std::vector<Edge> &edges() const { return edges_; }

    std::span<const NodeId> fan_in(NodeId id) const;
    std::span<const NodeId> fan_out(NodeId id) const;
    bool has_edge(NodeId src, NodeId dst) const;

    std::optional<NodeId> find(const IrNode &like) const;
    std::optional<NodeId> find_port(int x, int y, std::string_view name) const;

    // Copy with ids renumbered densely in node-key order. Per-node fan-in
    // order is preserved.
    RoutingGraph canonicalized() const;

    // Same node tuples (with delays) and same edge set; ids may differ.
    bool equivalent(const RoutingGraph &other) const;

    friend RoutingGraph deserialize_graph(std::string_view text);

private:
    NodeId insert_unchecked(IrNode n);
    void insert_edge_unchecked(NodeId src, NodeId dst);
    static uint64_t edge_hash(NodeId a, NodeId b) {
        return (static_cast<uint64_t>(a.value) << 32) | b.value;
    }

    int width_ = 0;
    int height_ = 0;
    std::map<int, int> layers_;
    std::map<std::pair<int, int>, TileInfo> tiles_;
    std::vector<IrNode> nodes_;
    std::vector<std::vector<NodeId>> fan_in_;
    std::vector<std::vector<NodeId>> fan_out_;
    std::vector<Edge> edges_;
    std::unordered_set<uint64_t> edge_set_;
    std::map<NodeKey, NodeId> index_;
};

std::vector<Diagnostic> validate(const RoutingGraph &g);

std::string serialize_graph(const RoutingGraph &g);
RoutingGraph deserialize_graph(std::string_view text);

} // namespace interlace::ir

template <> struct std::hash<interlace::ir::NodeId> {
    size_t operator()(interlace::ir::NodeId id) const noexcept {
        return std::hash<uint32_t>{}(id.value);
    }
};
