#include "interlace/ir/graph.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace interlace::ir {

std::string_view side_name(Side s) {
    switch (s) {
    case Side::North: return "north";
    case Side::East: return "east";
    case Side::South: return "south";
    case Side::West: return "west";
    }
    return "?";
}

char side_letter(Side s) { return "NESW"[static_cast<int>(s)]; }

std::optional<Side> parse_side(std::string_view text) {
    if (text == "north" || text == "N") return Side::North;
    if (text == "east" || text == "E") return Side::East;
    if (text == "south" || text == "S") return Side::South;
    if (text == "west" || text == "W") return Side::West;
    return std::nullopt;
}

std::string_view kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::SwitchBox: return "sb";
    case NodeKind::Port: return "port";
    case NodeKind::Register: return "reg";
    case NodeKind::RegMux: return "regmux";
    }
    return "?";
}

std::string_view rule_name(Rule r) {
    switch (r) {
    case Rule::OutOfBounds: return "OutOfBounds";
    case Rule::UnknownLayer: return "UnknownLayer";
    case Rule::TrackOutOfRange: return "TrackOutOfRange";
    case Rule::FieldMismatch: return "FieldMismatch";
    case Rule::NegativeDelay: return "NegativeDelay";
    case Rule::DuplicateNode: return "DuplicateNode";
    case Rule::UnknownNode: return "UnknownNode";
    case Rule::SelfLoop: return "SelfLoop";
    case Rule::DuplicateEdge: return "DuplicateEdge";
    case Rule::LayerMismatch: return "LayerMismatch";
    case Rule::UnknownPort: return "UnknownPort";
    }
    return "?";
}

IrNode IrNode::switch_box(int x, int y, Side side, int track, Io io,
                          int bitwidth, double delay) {
    IrNode n;
    n.kind = NodeKind::SwitchBox;
    n.x = x;
    n.y = y;
    n.side = side;
    n.track = track;
    n.io = io;
    n.bitwidth = bitwidth;
    n.delay = delay;
    return n;
}

IrNode IrNode::port(int x, int y, std::string name, int bitwidth,
                    double delay) {
    IrNode n;
    n.kind = NodeKind::Port;
    n.x = x;
    n.y = y;
    n.track = 0;
    n.port_name = std::move(name);
    n.bitwidth = bitwidth;
    n.delay = delay;
    return n;
}

IrNode IrNode::reg(int x, int y, Side side, int track, int bitwidth,
                   double delay) {
    IrNode n = switch_box(x, y, side, track, Io::Out, bitwidth, delay);
    n.kind = NodeKind::Register;
    return n;
}

IrNode IrNode::reg_mux(int x, int y, Side side, int track, int bitwidth,
                       double delay) {
    IrNode n = switch_box(x, y, side, track, Io::Out, bitwidth, delay);
    n.kind = NodeKind::RegMux;
    return n;
}

NodeKey node_key(const IrNode &n) {
    const bool is_port = n.kind == NodeKind::Port;
    const bool is_sb = n.kind == NodeKind::SwitchBox;
    return {n.bitwidth,
            n.y,
            n.x,
            static_cast<int>(n.kind),
            is_port ? -1 : static_cast<int>(n.side),
            is_port ? -1 : n.track,
            is_sb ? static_cast<int>(n.io) : -1,
            is_port ? n.port_name : std::string()};
}

std::string node_name(const IrNode &n) {
    switch (n.kind) {
    case NodeKind::SwitchBox:
        return fmt::format("sb{}_x{}_y{}_{}_t{}_{}", n.bitwidth, n.x, n.y,
                           side_letter(n.side), n.track,
                           n.io == Io::In ? "in" : "out");
    case NodeKind::Port:
        return fmt::format("p{}_x{}_y{}_{}", n.bitwidth, n.x, n.y,
                           n.port_name);
    case NodeKind::Register:
        return fmt::format("rg{}_x{}_y{}_{}_t{}", n.bitwidth, n.x, n.y,
                           side_letter(n.side), n.track);
    case NodeKind::RegMux:
        return fmt::format("rm{}_x{}_y{}_{}_t{}", n.bitwidth, n.x, n.y,
                           side_letter(n.side), n.track);
    }
    return {};
}

RoutingGraph::RoutingGraph(int width, int height)
    : width_(width), height_(height) {}

void RoutingGraph::add_layer(int bitwidth, int num_tracks) {
    layers_[bitwidth] = num_tracks;
}

int RoutingGraph::num_tracks(int bitwidth) const {
    auto it = layers_.find(bitwidth);
    if (it == layers_.end())
        throw Error(Errc::UnknownLayer,
                    fmt::format("no {}-bit layer", bitwidth));
    return it->second;
}

void RoutingGraph::set_tile(int x, int y, TileInfo info) {
    tiles_[{x, y}] = std::move(info);
}

const TileInfo *RoutingGraph::tile(int x, int y) const {
    auto it = tiles_.find({x, y});
    return it == tiles_.end() ? nullptr : &it->second;
}

NodeId RoutingGraph::insert_unchecked(IrNode n) {
    NodeId id{static_cast<uint32_t>(nodes_.size())};
    index_.emplace(node_key(n), id); // first occurrence wins
    nodes_.push_back(std::move(n));
    fan_in_.emplace_back();
    fan_out_.emplace_back();
    return id;
}

void RoutingGraph::insert_edge_unchecked(NodeId src, NodeId dst) {
    edges_.push_back({src, dst});
    if (contains(src) && contains(dst) && edge_set_.insert(edge_hash(src, dst)).second) {
        fan_out_[src.value].push_back(dst);
        fan_in_[dst.value].push_back(src);
    }
}

NodeId RoutingGraph::add_node(const IrNode &n) {
    if (!layers_.count(n.bitwidth))
        throw Error(Errc::UnknownLayer,
                    fmt::format("{}: no {}-bit layer", node_name(n),
                                n.bitwidth));
    if (n.x < 0 || n.x >= width_ || n.y < 0 || n.y >= height_)
        throw Error(Errc::OutOfBounds,
                    fmt::format("{}: outside {}x{} array", node_name(n),
                                width_, height_));
    if (n.kind != NodeKind::Port &&
        (n.track < 0 || n.track >= layers_.at(n.bitwidth)))
        throw Error(Errc::OutOfBounds,
                    fmt::format("{}: track outside 0..{}", node_name(n),
                                layers_.at(n.bitwidth) - 1));
    if (n.delay < 0)
        throw Error(Errc::OutOfBounds,
                    fmt::format("{}: negative delay", node_name(n)));
    if (auto it = index_.find(node_key(n)); it != index_.end())
        return it->second;
    return insert_unchecked(n);
}

const IrNode &RoutingGraph::node(NodeId id) const {
    if (!contains(id))
        throw Error(Errc::UnknownNode, fmt::format("unknown node {}", id.value));
    return nodes_[id.value];
}

void RoutingGraph::add_edge(NodeId src, NodeId dst) {
    const auto &a = node(src);
    const auto &b = node(dst);
    if (src == dst)
        throw Error(Errc::SelfLoop,
                    fmt::format("self loop on {}", node_name(a)));
    if (a.bitwidth != b.bitwidth)
        throw Error(Errc::LayerMismatch,
                    fmt::format("{} -> {} crosses bit widths", node_name(a),
                                node_name(b)));
    if (has_edge(src, dst))
        return;
    insert_edge_unchecked(src, dst);
}

std::span<const NodeId> RoutingGraph::fan_in(NodeId id) const {
    node(id);
    return fan_in_[id.value];
}

std::span<const NodeId> RoutingGraph::fan_out(NodeId id) const {
    node(id);
    return fan_out_[id.value];
}

bool RoutingGraph::has_edge(NodeId src, NodeId dst) const {
    return edge_set_.count(edge_hash(src, dst)) > 0;
}

std::optional<NodeId> RoutingGraph::find(const IrNode &like) const {
    auto it = index_.find(node_key(like));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<NodeId> RoutingGraph::find_port(int x, int y,
                                              std::string_view name) const {
    for (const auto &[bw, tracks] : layers_) {
        if (auto id = find(IrNode::port(x, y, std::string(name), bw)))
            return id;
    }
    return std::nullopt;
}

RoutingGraph RoutingGraph::canonicalized() const {
    std::vector<uint32_t> order(nodes_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return node_key(nodes_[a]) < node_key(nodes_[b]);
    });
    std::vector<NodeId> remap(nodes_.size());
    RoutingGraph out(width_, height_);
    out.layers_ = layers_;
    out.tiles_ = tiles_;
    for (uint32_t old : order)
        remap[old] = out.insert_unchecked(nodes_[old]);
    for (const auto &e : edges_) {
        if (!contains(e.src) || !contains(e.dst))
            continue;
        out.insert_edge_unchecked(remap[e.src.value], remap[e.dst.value]);
    }
    return out;
}

bool RoutingGraph::equivalent(const RoutingGraph &other) const {
    if (width_ != other.width_ || height_ != other.height_ ||
        layers_ != other.layers_ || nodes_.size() != other.nodes_.size() ||
        edge_set_.size() != other.edge_set_.size())
        return false;
    std::map<NodeKey, double> mine;
    for (const auto &n : nodes_)
        mine[node_key(n)] = n.delay;
    for (const auto &n : other.nodes_) {
        auto it = mine.find(node_key(n));
        if (it == mine.end() || it->second != n.delay)
            return false;
    }
    std::set<std::pair<NodeKey, NodeKey>> edges;
    for (const auto &e : edges_)
        if (contains(e.src) && contains(e.dst))
            edges.emplace(node_key(nodes_[e.src.value]),
                          node_key(nodes_[e.dst.value]));
    for (const auto &e : other.edges_) {
        if (!other.contains(e.src) || !other.contains(e.dst))
            return false;
        if (!edges.count({node_key(other.nodes_[e.src.value]),
                          node_key(other.nodes_[e.dst.value])}))
            return false;
    }
    return true;
}

std::vector<Diagnostic> validate(const RoutingGraph &g) {
    std::vector<Diagnostic> out;
    auto report = [&](Rule rule, std::string subject, std::string message) {
        out.push_back({rule, std::move(subject), std::move(message)});
    };

    std::map<NodeKey, uint32_t> seen;
    for (uint32_t i = 0; i < g.num_nodes(); ++i) {
        const auto &n = g.nodes()[i];
        const auto name = node_name(n);
        if (n.x < 0 || n.x >= g.width() || n.y < 0 || n.y >= g.height())
            report(Rule::OutOfBounds, name, "coordinates outside the array");
        auto layer = g.layers().find(n.bitwidth);
        if (layer == g.layers().end()) {
            report(Rule::UnknownLayer, name,
                   fmt::format("no {}-bit layer", n.bitwidth));
        } else if (n.kind != NodeKind::Port &&
                   (n.track < 0 || n.track >= layer->second)) {
            report(Rule::TrackOutOfRange, name,
                   fmt::format("track {} outside 0..{}", n.track,
                               layer->second - 1));
        }
        if (n.kind == NodeKind::Port && n.port_name.empty())
            report(Rule::FieldMismatch, name, "port node without a name");
        if (n.kind != NodeKind::Port && !n.port_name.empty())
            report(Rule::FieldMismatch, name,
                   "non-port node carries a port name");
        if (n.delay < 0)
            report(Rule::NegativeDelay, name, "negative delay");
        if (n.kind == NodeKind::Port) {
            if (const auto *t = g.tile(n.x, n.y)) {
                bool known =
                    std::count(t->inputs.begin(), t->inputs.end(),
                               n.port_name) +
                        std::count(t->outputs.begin(), t->outputs.end(),
                                   n.port_name) >
                    0;
                if (!known)
                    report(Rule::UnknownPort, name,
                           fmt::format("tile core '{}' has no port '{}'",
                                       t->core, n.port_name));
            }
        }
        auto [it, fresh] = seen.emplace(node_key(n), i);
        if (!fresh)
            report(Rule::DuplicateNode, name,
                   fmt::format("node {} duplicates node {}", i, it->second));
    }

    std::unordered_set<uint64_t> edge_seen;
    for (const auto &e : g.edges()) {
        auto subject = fmt::format("edge {} -> {}", e.src.value, e.dst.value);
        if (!g.contains(e.src) || !g.contains(e.dst)) {
            report(Rule::UnknownNode, subject, "endpoint does not exist");
            continue;
        }
        if (e.src == e.dst)
            report(Rule::SelfLoop, subject, "self loop");
        if (g.node(e.src).bitwidth != g.node(e.dst).bitwidth)
            report(Rule::LayerMismatch, subject, "endpoints in different layers");
        uint64_t h = (static_cast<uint64_t>(e.src.value) << 32) | e.dst.value;
        if (!edge_seen.insert(h).second)
            report(Rule::DuplicateEdge, subject, "duplicate edge");
    }
    return out;
}

namespace {

std::string join_names(const std::vector<std::string> &names) {
    if (names.empty())
        return "-";
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i)
            out += ',';
        out += names[i];
    }
    return out;
}

} // namespace

std::string serialize_graph(const RoutingGraph &g) {
    std::string out = "interlace-graph 1\n";
    out += fmt::format("array {} {}\n", g.width(), g.height());
    for (const auto &[xy, t] : g.tiles()) {
        out += fmt::format("tile {} {} core={} delay={} in={} out={}\n",
                           xy.first, xy.second, t.core.empty() ? "-" : t.core,
                           text::format_number(t.core_delay),
                           join_names(t.inputs), join_names(t.outputs));
    }
    // Dangling edges have no layer of their own; they are written into the
    // source node's layer section, or the first one.
    auto edge_layer = [&](const Edge &e) {
        if (g.contains(e.src))
            return g.node(e.src).bitwidth;
        if (g.contains(e.dst))
            return g.node(e.dst).bitwidth;
        return g.layers().empty() ? 0 : g.layers().begin()->first;
    };
    for (const auto &[bw, tracks] : g.layers()) {
        out += fmt::format("[layer {} tracks={}]\n", bw, tracks);
        for (uint32_t i = 0; i < g.num_nodes(); ++i) {
            const auto &n = g.nodes()[i];
            if (n.bitwidth != bw)
                continue;
            auto delay = text::format_number(n.delay);
            switch (n.kind) {
            case NodeKind::SwitchBox:
                out += fmt::format("node {} sb {} {} {} {} {} delay={}\n", i,
                                   n.x, n.y, side_name(n.side), n.track,
                                   n.io == Io::In ? "in" : "out", delay);
                break;
            case NodeKind::Port:
                out += fmt::format("node {} port {} {} port={} delay={}\n", i,
                                   n.x, n.y, n.port_name, delay);
                break;
            case NodeKind::Register:
            case NodeKind::RegMux:
                out += fmt::format("node {} {} {} {} {} {} delay={}\n", i,
                                   kind_name(n.kind), n.x, n.y,
                                   side_name(n.side), n.track, delay);
                break;
            }
        }
        for (const auto &e : g.edges())
            if (edge_layer(e) == bw)
                out += fmt::format("edge {} {}\n", e.src.value, e.dst.value);
    }
    return out;
}

RoutingGraph deserialize_graph(std::string_view src) {
    RoutingGraph g;
    bool have_header = false, have_array = false;
    std::optional<int> layer;
    std::map<long long, std::pair<IrNode, int>> nodes; // id -> node, line
    std::vector<std::pair<long long, long long>> edges;
    std::vector<int> edge_lines;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos
                                        ? std::string_view::npos
                                        : nl - pos);
        pos = nl == std::string_view::npos ? src.size() + 1 : nl + 1;
        ++line_no;
        auto tok = text::tokenize(line);
        if (tok.empty())
            continue;
        auto expect = [&](size_t n) {
            if (tok.size() != n)
                throw ParseError(
                    fmt::format("'{}' expects {} fields, got {}", tok[0].text,
                                n, tok.size()),
                    line_no, tok.back().column);
        };
        auto integer = [&](size_t i) {
            return static_cast<int>(
                text::parse_int(tok[i].text, line_no, tok[i].column));
        };
        auto keyed = [&](size_t i, std::string_view key) {
            auto kv = text::split_key_value(tok[i].text);
            if (!kv || kv->first != key)
                throw ParseError(fmt::format("expected {}=...", key), line_no,
                                 tok[i].column);
            return kv->second;
        };
        auto head = tok[0].text;

        if (!have_header) {
            if (head != "interlace-graph" || tok.size() != 2 ||
                tok[1].text != "1")
                throw ParseError("missing 'interlace-graph 1' header",
                                 line_no, tok[0].column);
            have_header = true;
            continue;
        }
        if (head == "array") {
            expect(3);
            g.width_ = integer(1);
            g.height_ = integer(2);
            have_array = true;
        } else if (head == "tile") {
            expect(7);
            TileInfo t;
            auto core = keyed(3, "core");
            t.core = core == "-" ? std::string() : std::string(core);
            auto d = keyed(4, "delay");
            t.core_delay = text::parse_double(d, line_no, tok[4].column);
            for (auto [idx, key, dst] :
                 {std::tuple{5, "in", &t.inputs}, std::tuple{6, "out", &t.outputs}}) {
                auto v = keyed(idx, key);
                if (v != "-")
                    for (auto p : text::split(v, ','))
                        dst->emplace_back(p);
            }
            g.tiles_[{integer(1), integer(2)}] = std::move(t);
        } else if (head == "[layer") {
            expect(3);
            auto tracks_tok = tok[2].text;
            if (tracks_tok.empty() || tracks_tok.back() != ']')
                throw ParseError("layer header must end with ']'", line_no,
                                 tok[2].column);
            tracks_tok.remove_suffix(1);
            auto kv = text::split_key_value(tracks_tok);
            if (!kv || kv->first != "tracks")
                throw ParseError("expected tracks=<n>", line_no, tok[2].column);
            int bw = integer(1);
            g.layers_[bw] = static_cast<int>(
                text::parse_int(kv->second, line_no, tok[2].column + 7));
            layer = bw;
        } else if (head == "node") {
            if (!layer)
                throw ParseError("node outside a [layer] section", line_no,
                                 tok[0].column);
            if (tok.size() < 4)
                throw ParseError("truncated node line", line_no,
                                 tok.back().column);
            long long id = text::parse_int(tok[1].text, line_no, tok[1].column);
            auto kind = tok[2].text;
            IrNode n;
            n.bitwidth = *layer;
            auto side_at = [&](size_t i) {
                auto s = parse_side(tok[i].text);
                if (!s)
                    throw ParseError(
                        fmt::format("unknown side '{}'", tok[i].text), line_no,
                        tok[i].column);
                return *s;
            };
            size_t delay_idx = 0;
            if (kind == "sb") {
                expect(9);
                n.kind = NodeKind::SwitchBox;
                n.side = side_at(5);
                n.track = integer(6);
                if (tok[7].text == "in")
                    n.io = Io::In;
                else if (tok[7].text == "out")
                    n.io = Io::Out;
                else
                    throw ParseError("expected in|out", line_no, tok[7].column);
                delay_idx = 8;
            } else if (kind == "port") {
                expect(7);
                n.kind = NodeKind::Port;
                n.port_name = std::string(keyed(5, "port"));
                delay_idx = 6;
            } else if (kind == "reg" || kind == "regmux") {
                expect(8);
                n.kind = kind == "reg" ? NodeKind::Register : NodeKind::RegMux;
                n.side = side_at(5);
                n.track = integer(6);
                n.io = Io::Out;
                delay_idx = 7;
            } else {
                throw ParseError(fmt::format("unknown node kind '{}'", kind),
                                 line_no, tok[2].column);
            }
            n.x = integer(3);
            n.y = integer(4);
            n.delay = text::parse_double(keyed(delay_idx, "delay"), line_no,
                                         tok[delay_idx].column);
            if (!nodes.emplace(id, std::pair{std::move(n), line_no}).second)
                throw ParseError(fmt::format("node id {} defined twice", id),
                                 line_no, tok[1].column);
        } else if (head == "edge") {
            if (!layer)
                throw ParseError("edge outside a [layer] section", line_no,
                                 tok[0].column);
            expect(3);
            edges.emplace_back(
                text::parse_int(tok[1].text, line_no, tok[1].column),
                text::parse_int(tok[2].text, line_no, tok[2].column));
            edge_lines.push_back(line_no);
        } else {
            throw ParseError(fmt::format("unknown directive '{}'", head),
                             line_no, tok[0].column);
        }
    }
    if (!have_header || !have_array)
        throw ParseError("truncated graph file (no array line)", line_no, 1);

    long long expected = 0;
    for (auto &[id, entry] : nodes) {
        if (id != expected)
            throw ParseError(
                fmt::format("node ids must be dense; missing id {}", expected),
                entry.second, 1);
        g.insert_unchecked(std::move(entry.first));
        ++expected;
    }
    for (size_t i = 0; i < edges.size(); ++i) {
        auto [a, b] = edges[i];
        if (a < 0 || b < 0 || a > UINT32_MAX || b > UINT32_MAX)
            throw ParseError("edge endpoint out of range", edge_lines[i], 1);
        g.insert_edge_unchecked(NodeId{static_cast<uint32_t>(a)},
                                NodeId{static_cast<uint32_t>(b)});
    }
    return g;
}

} // namespace interlace::ir
