#include "interlace/rtl/netlist.hpp"

#include "interlace/arch/builder.hpp"
#include "interlace/error.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

namespace interlace::rtl {

using ir::IrNode;
using ir::NodeId;
using ir::NodeKind;
using ir::RoutingGraph;

namespace {

struct Group {
    int feature = 0;
    std::vector<int> used; // bits used per register
};

struct TileConfig {
    int next_feature = 0;
    std::map<std::string, Group> groups;
};

bool lists(const std::vector<std::string> &v, const std::string &name) {
    return std::find(v.begin(), v.end(), name) != v.end();
}

class Lowering {
public:
    Lowering(const RoutingGraph &g, bool rv, ReadyValidOptions opt)
        : g_(g), rv_(rv), opt_(opt) {
        auto diags = ir::validate(g);
        if (!diags.empty())
            throw Error(Errc::InvalidGraph,
                        fmt::format("graph has {} diagnostics; first: {}",
                                    diags.size(), diags.front().message));
        if (opt_.split_chain_depth < 1)
            throw Error(Errc::InvalidSpec, "split chain depth must be >= 1");
    }

    StructNetlist run() {
        for (const auto &[xy, info] : g_.tiles())
            lower_core(xy.first, xy.second, info);
        for (uint32_t i = 0; i < g_.num_nodes(); ++i)
            lower_node(NodeId{i});
        if (rv_) {
            for (uint32_t i = 0; i < g_.num_nodes(); ++i)
                lower_ready(NodeId{i});
            for (const auto &[bw, tracks] : g_.layers()) {
                bool any = std::any_of(g_.nodes().begin(), g_.nodes().end(),
                                       [bw = bw](const IrNode &n) {
                                           return n.bitwidth == bw &&
                                                  n.kind == NodeKind::Register;
                                       });
                if (!any)
                    n_.diagnostics.push_back(fmt::format(
                        "NoRegisters: layer {} has no pipeline registers", bw));
            }
        }
        emit_config_registers();
        std::sort(n_.config.begin(), n_.config.end(),
                  [](const ConfigField &a, const ConfigField &b) {
                      return std::pair(a.address(), a.bit_offset) <
                             std::pair(b.address(), b.bit_offset);
                  });
        return std::move(n_);
    }

private:
    const RoutingGraph &g_;
    bool rv_;
    ReadyValidOptions opt_;
    StructNetlist n_;
    std::map<std::pair<int, int>, TileConfig> cfg_;

    static std::string cfg_wire(int x, int y, int f, int r) {
        return fmt::format("cfg_x{}_y{}_f{}_r{}", x, y, f, r);
    }

    Instance make(std::string name, Prim p, int x, int y) {
        Instance i;
        i.name = std::move(name);
        i.prim = p;
        i.params["X"] = x;
        i.params["Y"] = y;
        return i;
    }

    void wire(std::string name, int width) {
        n_.wires.push_back({std::move(name), width});
    }

    PinRef field(int x, int y, const std::string &group, int width,
                 FieldMeaning meaning, const std::string &inst,
                 const std::string &pin) {
        auto &tile = cfg_[{x, y}];
        auto [it, fresh] = tile.groups.try_emplace(group);
        auto &grp = it->second;
        if (fresh)
            grp.feature = tile.next_feature++;
        if (grp.used.empty() || grp.used.back() + width > kConfigWordBits)
            grp.used.push_back(0);
        const int reg = static_cast<int>(grp.used.size()) - 1;
        const int offset = grp.used.back();
        grp.used.back() += width;
        n_.config.push_back({x, y, grp.feature, reg, offset, width, meaning,
                             inst, pin});
        return {cfg_wire(x, y, grp.feature, reg), offset + width - 1, offset};
    }

    void emit_config_registers() {
        for (const auto &[xy, tile] : cfg_)
            for (const auto &[name, grp] : tile.groups)
                for (size_t r = 0; r < grp.used.size(); ++r) {
                    auto [x, y] = xy;
                    const int reg = static_cast<int>(r);
                    auto w = cfg_wire(x, y, grp.feature, reg);
                    wire(w, kConfigWordBits);
                    auto inst = make(cfg_instance(x, y, grp.feature, reg),
                                     Prim::CfgReg, x, y);
                    inst.params["W"] = kConfigWordBits;
                    inst.params["FEATURE"] = grp.feature;
                    inst.params["REG"] = reg;
                    inst.params["ADDR"] = pack_address(x, y, grp.feature, reg);
                    inst.pins.push_back({"q", {w}});
                    n_.instances.push_back(std::move(inst));
                }
    }

    std::string group_of(const IrNode &n) const {
        if (n.kind == NodeKind::Port)
            return "cb_" + n.port_name;
        return fmt::format("sb{}", n.bitwidth);
    }

    bool is_core_output(const IrNode &n) const {
        if (n.kind != NodeKind::Port)
            return false;
        const auto *t = g_.tile(n.x, n.y);
        return t && lists(t->outputs, n.port_name);
    }

    bool is_core_input(const IrNode &n) const {
        if (n.kind != NodeKind::Port)
            return false;
        const auto *t = g_.tile(n.x, n.y);
        return t && lists(t->inputs, n.port_name);
    }

    void lower_core(int x, int y, const ir::TileInfo &info) {
        if (info.core.empty())
            return;
        auto inst = make(core_instance(x, y), Prim::Core, x, y);
        inst.core = info.core;
        // Core inputs can absorb a register or a constant; their switches live
        // in feature 0 of the tile.
        for (const auto &p : info.inputs) {
            auto id = g_.find_port(x, y, p);
            if (!id)
                continue;
            const auto &node = g_.node(*id);
            inst.pins.push_back({"i_" + p, {data_wire(node)}});
            for (auto [suffix, width] :
                 {std::pair{"reg_en", 1}, std::pair{"const_en", 1},
                  std::pair{"const", node.bitwidth}}) {
                auto pin = fmt::format("c_{}_{}", p, suffix);
                inst.pins.push_back(
                    {pin, field(x, y, "core", width, FieldMeaning::CoreConfig,
                                inst.name, pin)});
            }
            if (rv_) {
                inst.pins.push_back({"i_" + p + "_valid", {valid_wire(node)}});
                inst.pins.push_back({"o_" + p + "_ready", {"r_" + ir::node_name(node)}});
            }
        }
        for (const auto &p : info.outputs) {
            auto id = g_.find_port(x, y, p);
            if (!id)
                continue;
            const auto &node = g_.node(*id);
            inst.pins.push_back({"o_" + p, {data_wire(node)}});
            if (rv_) {
                inst.pins.push_back({"o_" + p + "_valid", {valid_wire(node)}});
                inst.pins.push_back({"i_" + p + "_ready", {"rj_" + ir::node_name(node)}});
            }
        }
        n_.instances.push_back(std::move(inst));
    }

    void tie(const std::string &inst, const std::string &w, int width,
             long long value, int x, int y) {
        auto c = make(inst, Prim::Const, x, y);
        c.params["W"] = width;
        c.params["VALUE"] = value;
        c.pins.push_back({"out", {w}});
        n_.instances.push_back(std::move(c));
    }

    void lower_node(NodeId id) {
        const auto &node = g_.node(id);
        const auto name = ir::node_name(node);
        const auto d = data_wire(node);
        const auto v = valid_wire(node);
        const int w = node.bitwidth;
        auto fi = g_.fan_in(id);
        const int k = static_cast<int>(fi.size());
        wire(d, w);
        if (rv_) {
            wire(v, 1);
            wire((is_core_input(node) ? "r_" : "rj_") + name, 1);
        }

        if (node.kind == NodeKind::Register) {
            if (k > 1)
                throw Error(Errc::InvalidGraph,
                            fmt::format("register {} has fan-in {}", name, k));
            lower_register(node, k ? &g_.node(fi[0]) : nullptr);
            return;
        }
        if (is_core_output(node)) {
            if (k > 0)
                throw Error(Errc::InvalidGraph,
                            fmt::format("core output {} has fan-in {}", name, k));
            return; // the core instance drives it
        }
        if (k >= 2) {
            auto mux = make(mux_instance(node), Prim::Mux, node.x, node.y);
            mux.params["K"] = k;
            mux.params["W"] = w;
            for (int i = 0; i < k; ++i)
                mux.pins.push_back({fmt::format("in{}", i), {data_wire(g_.node(fi[i]))}});
            auto sel = field(node.x, node.y, group_of(node), select_width(k),
                             FieldMeaning::MuxSelect, mux.name, "sel");
            mux.pins.push_back({"sel", sel});
            mux.pins.push_back({"out", {d}});
            if (rv_) {
                auto oh = "oh_" + name;
                wire(oh, k);
                mux.pins.push_back({"oh", {oh}});
                auto vmux = make("vmux_" + name, Prim::Mux, node.x, node.y);
                vmux.params["K"] = k;
                vmux.params["W"] = 1;
                for (int i = 0; i < k; ++i)
                    vmux.pins.push_back({fmt::format("in{}", i), {valid_wire(g_.node(fi[i]))}});
                vmux.pins.push_back({"sel", sel});
                vmux.pins.push_back({"out", {v}});
                n_.instances.push_back(std::move(vmux));
            }
            n_.instances.push_back(std::move(mux));
            return;
        }
        if (k == 1) {
            const auto &src = g_.node(fi[0]);
            n_.assigns.push_back({d, {data_wire(src)}, node.x, node.y});
            if (rv_)
                n_.assigns.push_back({v, {valid_wire(src)}, node.x, node.y});
            return;
        }
        tie("const_" + name, d, w, 0, node.x, node.y);
        if (rv_)
            tie("vconst_" + name, v, 1, 0, node.x, node.y);
    }

    void lower_register(const IrNode &node, const IrNode *src) {
        const auto name = ir::node_name(node);
        const int w = node.bitwidth;
        std::string in = src ? data_wire(*src) : "z_" + name;
        if (!src) {
            wire(in, w);
            tie("const_z_" + name, in, w, 0, node.x, node.y);
        }
        if (!rv_) {
            auto r = make(reg_instance(node), Prim::Reg, node.x, node.y);
            r.params["W"] = w;
            r.pins.push_back({"d", {in}});
            r.pins.push_back({"q", {data_wire(node)}});
            n_.instances.push_back(std::move(r));
            return;
        }
        const bool split = opt_.fifo == FifoMode::Split;
        auto r = make(reg_instance(node), Prim::FifoReg, node.x, node.y);
        r.params["W"] = w;
        r.params["DEPTH"] = split ? 1 : 2;
        r.params["SPLIT"] = split ? 1 : 0;
        if (split)
            r.params["CHAIN"] = opt_.split_chain_depth;
        std::string vin = src ? valid_wire(*src) : "vz_" + name;
        if (!src) {
            wire(vin, 1);
            tie("vconst_z_" + name, vin, 1, 0, node.x, node.y);
        }
        r.pins.push_back({"d", {in}});
        r.pins.push_back({"q", {data_wire(node)}});
        r.pins.push_back({"vin", {vin}});
        r.pins.push_back({"vout", {valid_wire(node)}});
        r.pins.push_back({"rin", {"rj_" + name}});
        wire("r_" + name, 1);
        r.pins.push_back({"rout", {"r_" + name}});
        r.pins.push_back({"mode", field(node.x, node.y, group_of(node), 1,
                                        FieldMeaning::FifoMode, r.name, "mode")});
        if (split) {
            r.pins.push_back(
                {"role", field(node.x, node.y, group_of(node),
                               select_width(opt_.split_chain_depth + 1),
                               FieldMeaning::SplitFifoRole, r.name, "role")});
            // Control comes from the register feeding this tile on the same
            // side and track, one tile upstream.
            auto [ux, uy] = arch::neighbor(node.x, node.y, ir::opposite(node.side));
            std::optional<NodeId> up;
            if (ux >= 0 && uy >= 0 && ux < g_.width() && uy < g_.height())
                up = g_.find(IrNode::reg(ux, uy, node.side, node.track, w));
            std::string ctl_in;
            if (up) {
                ctl_in = "ctl_" + ir::node_name(g_.node(*up));
            } else {
                ctl_in = "ctlz_" + name;
                wire(ctl_in, 2);
                tie("cconst_" + name, ctl_in, 2, 0, node.x, node.y);
            }
            wire("ctl_" + name, 2);
            r.pins.push_back({"ctl_in", {ctl_in}});
            r.pins.push_back({"ctl_out", {"ctl_" + name}});
        }
        n_.instances.push_back(std::move(r));
    }

    std::string ready_of(const IrNode &c) const {
        const auto name = ir::node_name(c);
        if (c.kind == NodeKind::Register || is_core_input(c))
            return "r_" + name;
        return "rj_" + name;
    }

    // Ready toward u's drivers: every consumer that currently selects u must
    // be ready. The consumer's one-hot select tells whether it selects u.
    void lower_ready(NodeId id) {
        const auto &node = g_.node(id);
        if (is_core_input(node))
            return;
        const auto name = ir::node_name(node);
        const auto rj = "rj_" + name;
        struct Term {
            std::string ready;
            std::optional<PinRef> enable;
        };
        std::vector<Term> terms;
        for (auto c : g_.fan_out(id)) {
            const auto &cn = g_.node(c);
            auto fi = g_.fan_in(c);
            Term t{ready_of(cn), std::nullopt};
            if (fi.size() >= 2) {
                int idx = static_cast<int>(std::find(fi.begin(), fi.end(), id) - fi.begin());
                t.enable = PinRef{"oh_" + ir::node_name(cn), idx, idx};
            }
            terms.push_back(std::move(t));
        }
        if (terms.empty()) {
            tie("rconst_" + name, rj, 1, 1, node.x, node.y);
            return;
        }
        if (terms.size() == 1 && !terms[0].enable) {
            n_.assigns.push_back({rj, {terms[0].ready}, node.x, node.y});
            return;
        }
        auto j = make("join_" + name, Prim::Join, node.x, node.y);
        j.params["N"] = static_cast<long long>(terms.size());
        for (size_t i = 0; i < terms.size(); ++i) {
            j.pins.push_back({fmt::format("rdy{}", i), {terms[i].ready}});
            if (terms[i].enable)
                j.pins.push_back({fmt::format("en{}", i), *terms[i].enable});
        }
        j.pins.push_back({"out", {rj}});
        n_.instances.push_back(std::move(j));
    }
};

} // namespace

StructNetlist lower_static(const RoutingGraph &g) {
    return Lowering(g, false, {}).run();
}

StructNetlist lower_ready_valid(const RoutingGraph &g,
                                const ReadyValidOptions &options) {
    return Lowering(g, true, options).run();
}

} // namespace interlace::rtl
