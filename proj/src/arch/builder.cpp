#include "interlace/arch/builder.hpp"

#include "interlace/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace interlace::arch {

using ir::Io;
using ir::IrNode;
using ir::NodeId;
using ir::NodeKind;
using ir::RoutingGraph;

namespace {

void check_turn(Side from, Side to, int t, int num_tracks) {
    if (from == to)
        throw Error(Errc::SameSide,
                    fmt::format("track map from {} to itself",
                                ir::side_name(from)));
    if (t < 0 || t >= num_tracks)
        throw Error(Errc::OutOfBounds,
                    fmt::format("track {} outside 0..{}", t, num_tracks - 1));
}

RoutingGraph copy_nodes(const RoutingGraph &g) {
    RoutingGraph out(g.width(), g.height());
    for (const auto &[bw, tracks] : g.layers())
        out.add_layer(bw, tracks);
    for (const auto &[xy, info] : g.tiles())
        out.set_tile(xy.first, xy.second, info);
    for (const auto &n : g.nodes())
        out.add_node(n);
    return out;
}

const LayerSpec *find_layer(const ArchSpec &spec, int bitwidth) {
    for (const auto &l : spec.layers)
        if (l.bitwidth == bitwidth)
            return &l;
    return nullptr;
}

bool is_core_output(const RoutingGraph &g, const IrNode &n) {
    if (n.kind != NodeKind::Port)
        return false;
    const auto *t = g.tile(n.x, n.y);
    return t && std::find(t->outputs.begin(), t->outputs.end(), n.port_name) !=
                    t->outputs.end();
}

bool allowed(const std::set<int> &tracks, int t) {
    return tracks.empty() || tracks.count(t) > 0;
}

} // namespace

int disjoint_map(Side from, Side to, int t, int num_tracks) {
    check_turn(from, to, t, num_tracks);
    return t;
}

int wilton_map(Side from, Side to, int t, int num_tracks) {
    check_turn(from, to, t, num_tracks);
    if (to == ir::opposite(from))
        return t;
    const int f = static_cast<int>(from);
    const int d = static_cast<int>(to);
    if (d == (f + 1) % 4)
        return (num_tracks - t) % num_tracks;
    return (t + 1) % num_tracks;
}

int track_map(Topology topo, Side from, Side to, int t, int num_tracks) {
    return topo == Topology::Wilton ? wilton_map(from, to, t, num_tracks)
                                    : disjoint_map(from, to, t, num_tracks);
}

std::pair<int, int> neighbor(int x, int y, Side side) {
    switch (side) {
    case Side::North: return {x, y - 1};
    case Side::East: return {x + 1, y};
    case Side::South: return {x, y + 1};
    case Side::West: return {x - 1, y};
    }
    return {x, y};
}

std::vector<int> registered_tracks(double reg_density, int num_tracks) {
    std::vector<int> out;
    if (reg_density <= 0.0)
        return out;
    const int step = static_cast<int>(std::ceil(1.0 / reg_density - 1e-9));
    for (int t = 0; t < num_tracks; t += std::max(step, 1))
        out.push_back(t);
    return out;
}

RoutingGraph create_uniform_interconnect(const ArchSpec &spec) {
    check_spec(spec);
    RoutingGraph g(spec.width, spec.height);
    for (const auto &l : spec.layers)
        g.add_layer(l.bitwidth, l.num_tracks);

    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const auto &core = tile_core(spec, x, y);
            if (!core)
                continue;
            ir::TileInfo info;
            info.core = core->name;
            info.core_delay = core->delay;
            for (const auto &p : core->inputs)
                info.inputs.push_back(p.name);
            for (const auto &p : core->outputs)
                info.outputs.push_back(p.name);
            g.set_tile(x, y, std::move(info));
        }

    for (const auto &layer : spec.layers) {
        const int bw = layer.bitwidth;
        const int W = layer.num_tracks;
        auto sb = [&](int x, int y, Side s, int t, Io io) {
            return g.add_node(IrNode::switch_box(
                x, y, s, t, io, bw,
                io == Io::In ? spec.wire_delay : spec.mux_delay));
        };

        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                for (auto s : ir::kAllSides)
                    for (int t = 0; t < W; ++t) {
                        sb(x, y, s, t, Io::In);
                        sb(x, y, s, t, Io::Out);
                    }
                const auto &core = tile_core(spec, x, y);
                if (!core)
                    continue;
                for (const auto &p : core->inputs)
                    if (p.bitwidth == bw)
                        g.add_node(IrNode::port(x, y, p.name, bw, spec.mux_delay));
                for (const auto &p : core->outputs)
                    if (p.bitwidth == bw)
                        g.add_node(IrNode::port(x, y, p.name, bw, 0.0));
            }

        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                // Switch box: every incoming track reaches each other side once.
                for (auto from : ir::kAllSides)
                    for (int t = 0; t < W; ++t)
                        for (auto to : ir::kAllSides) {
                            if (to == from)
                                continue;
                            int mapped = track_map(layer.topology, from, to, t, W);
                            g.add_edge(sb(x, y, from, t, Io::In),
                                       sb(x, y, to, mapped, Io::Out));
                        }
                const auto &core = tile_core(spec, x, y);
                if (!core)
                    continue;
                for (const auto &p : core->outputs) {
                    if (p.bitwidth != bw)
                        continue;
                    auto port = *g.find(IrNode::port(x, y, p.name, bw));
                    for (auto s : ir::kAllSides)
                        for (int t = 0; t < W; ++t)
                            g.add_edge(port, sb(x, y, s, t, Io::Out));
                }
                for (const auto &p : core->inputs) {
                    if (p.bitwidth != bw)
                        continue;
                    auto port = *g.find(IrNode::port(x, y, p.name, bw));
                    for (auto s : ir::kAllSides)
                        for (int t = 0; t < W; ++t)
                            g.add_edge(sb(x, y, s, t, Io::In), port);
                }
            }

        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                for (auto s : ir::kAllSides) {
                    auto [nx, ny] = neighbor(x, y, s);
                    if (nx < 0 || ny < 0 || nx >= spec.width || ny >= spec.height)
                        continue;
                    for (int t = 0; t < W; ++t)
                        g.add_edge(sb(x, y, s, t, Io::Out),
                                   sb(nx, ny, ir::opposite(s), t, Io::In));
                }
    }

    g = apply_port_policy(g, spec);
    g = insert_registers(g, spec);
    return g.canonicalized();
}

RoutingGraph apply_port_policy(const RoutingGraph &g, const ArchSpec &spec) {
    const auto &policy = spec.policy;
    if (policy.cb_sides.empty() || policy.sb_out_sides.empty())
        throw Error(Errc::EmptyPolicy, "port policy sides must be non-empty");
    RoutingGraph out = copy_nodes(g);
    for (const auto &e : g.edges()) {
        const auto &a = g.node(e.src);
        const auto &b = g.node(e.dst);
        if (is_core_output(g, a) && b.kind == NodeKind::SwitchBox &&
            b.io == Io::Out &&
            (!policy.sb_out_sides.count(b.side) ||
             !allowed(policy.sb_out_tracks, b.track)))
            continue;
        if (a.kind == NodeKind::SwitchBox && a.io == Io::In &&
            b.kind == NodeKind::Port &&
            (!policy.cb_sides.count(a.side) ||
             !allowed(policy.cb_tracks, a.track)))
            continue;
        out.add_edge(e.src, e.dst);
    }
    return out;
}

RoutingGraph insert_registers(const RoutingGraph &g, const ArchSpec &spec) {
    RoutingGraph out = copy_nodes(g);
    for (const auto &e : g.edges()) {
        const auto &a = g.node(e.src);
        const auto &b = g.node(e.dst);
        const auto *layer = find_layer(spec, a.bitwidth);
        bool split = layer && a.kind == NodeKind::SwitchBox &&
                     a.io == Io::Out && b.kind == NodeKind::SwitchBox &&
                     b.io == Io::In && (a.x != b.x || a.y != b.y);
        if (split) {
            auto tracks = registered_tracks(layer->reg_density,
                                            g.num_tracks(a.bitwidth));
            split = std::find(tracks.begin(), tracks.end(), a.track) !=
                    tracks.end();
        }
        if (!split) {
            out.add_edge(e.src, e.dst);
            continue;
        }
        auto reg = out.add_node(IrNode::reg(a.x, a.y, a.side, a.track,
                                            a.bitwidth, spec.reg_delay));
        auto mux = out.add_node(IrNode::reg_mux(a.x, a.y, a.side, a.track,
                                                a.bitwidth, spec.mux_delay));
        out.add_edge(e.src, reg);
        out.add_edge(e.src, mux); // bypass is select 0
        out.add_edge(reg, mux);
        out.add_edge(mux, e.dst);
    }
    return out;
}

} // namespace interlace::arch
