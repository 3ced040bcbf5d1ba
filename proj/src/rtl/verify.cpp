#include "interlace/rtl/verify.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace interlace::rtl {

using ir::NodeId;
using ir::NodeKind;

std::string_view finding_name(FindingKind k) {
    switch (k) {
    case FindingKind::MissingWire: return "missing-wire";
    case FindingKind::ExtraWire: return "extra-wire";
    case FindingKind::Undriven: return "undriven";
    case FindingKind::MissingEdge: return "missing-edge";
    case FindingKind::ExtraEdge: return "extra-edge";
    case FindingKind::WrongInput: return "wrong-input";
    case FindingKind::KindMismatch: return "kind-mismatch";
    case FindingKind::SelectMismatch: return "select-mismatch";
    }
    return "?";
}

size_t Report::count(FindingKind k) const {
    return static_cast<size_t>(std::count_if(
        findings.begin(), findings.end(),
        [k](const Finding &f) { return f.kind == k; }));
}

namespace {

struct Driver {
    const Instance *inst = nullptr;
    const Assign *assign = nullptr;
};

struct Net {
    std::string prefix;      // "d_" or "v_"
    std::string reg_in_pin;  // "d" or "vin"
    std::string mux_prefix;  // "mux_" or "vmux_"
};

bool is_core_output(const ir::RoutingGraph &g, const ir::IrNode &n) {
    if (n.kind != NodeKind::Port)
        return false;
    const auto *t = g.tile(n.x, n.y);
    return t && std::find(t->outputs.begin(), t->outputs.end(), n.port_name) !=
                    t->outputs.end();
}

Report compare(const ir::RoutingGraph &g, const StructNetlist &n, const Net &net) {
    Report rep;
    std::unordered_map<std::string, Driver> drivers;
    for (const auto &inst : n.instances)
        for (const auto &p : inst.pins)
            if (pin_is_output(inst, p.name))
                drivers.try_emplace(p.ref.wire, Driver{&inst, nullptr});
    for (const auto &a : n.assigns)
        drivers.try_emplace(a.lhs, Driver{nullptr, &a});
    std::unordered_set<std::string> declared;
    for (const auto &w : n.wires)
        declared.insert(w.name);

    std::unordered_set<std::string> node_wires;
    for (const auto &node : g.nodes())
        node_wires.insert(net.prefix + ir::node_name(node));

    // A register with nothing upstream reads a constant tie, not a node.
    auto is_tie = [&](const std::string &w) {
        if (node_wires.count(w))
            return false;
        auto it = drivers.find(w);
        return it != drivers.end() && it->second.inst &&
               it->second.inst->prim == Prim::Const;
    };

    auto add = [&](FindingKind k, std::string subject, std::string detail) {
        rep.findings.push_back({k, std::move(subject), std::move(detail)});
    };

    for (uint32_t i = 0; i < g.num_nodes(); ++i) {
        const auto &node = g.node(NodeId{i});
        const auto name = ir::node_name(node);
        const auto w = net.prefix + name;
        auto fi = g.fan_in(NodeId{i});
        ++rep.nodes_checked;
        rep.edges_checked += fi.size();

        auto it = drivers.find(w);
        if (it == drivers.end()) {
            add(declared.count(w) ? FindingKind::Undriven : FindingKind::MissingWire,
                w, "no driver");
            continue;
        }
        const auto &drv = it->second;
        std::vector<std::optional<std::string>> seen;
        std::string got_kind;
        if (drv.assign) {
            seen.push_back(drv.assign->rhs.wire);
            got_kind = "assign";
        } else {
            const auto &inst = *drv.inst;
            got_kind = prim_type_name(inst.prim, inst.core);
            if (inst.prim == Prim::Mux) {
                for (const auto &p : inst.pins) {
                    if (p.name.size() < 3 || p.name.substr(0, 2) != "in")
                        continue;
                    auto idx = std::stoul(p.name.substr(2));
                    if (seen.size() <= idx)
                        seen.resize(idx + 1);
                    seen[idx] = p.ref.wire;
                }
            } else if (inst.prim == Prim::Reg || inst.prim == Prim::FifoReg) {
                if (const auto *d = inst.pin(net.reg_in_pin); d && !is_tie(d->wire))
                    seen.push_back(d->wire);
            }
        }

        const int k = static_cast<int>(fi.size());
        std::string want_kind;
        if (node.kind == NodeKind::Register) {
            if (!drv.inst || (drv.inst->prim != Prim::Reg && drv.inst->prim != Prim::FifoReg))
                want_kind = "register";
        } else if (is_core_output(g, node)) {
            if (!drv.inst || drv.inst->prim != Prim::Core)
                want_kind = "core pin";
        } else if (k >= 2) {
            if (!drv.inst || drv.inst->prim != Prim::Mux)
                want_kind = "mux";
        } else if (k == 1) {
            if (!drv.assign)
                want_kind = "assign";
        } else if (!drv.inst || drv.inst->prim != Prim::Const) {
            want_kind = "constant";
        }
        if (!want_kind.empty())
            add(FindingKind::KindMismatch, w,
                fmt::format("expected {}, found {}", want_kind, got_kind));

        const size_t len = std::max(seen.size(), fi.size());
        for (size_t j = 0; j < len; ++j) {
            std::optional<std::string> want;
            if (j < fi.size())
                want = net.prefix + ir::node_name(g.node(fi[j]));
            const auto &got = j < seen.size() ? seen[j] : std::optional<std::string>{};
            if (want && !got)
                add(FindingKind::MissingEdge, w,
                    fmt::format("input {} from {} is missing", j, *want));
            else if (!want && got)
                add(FindingKind::ExtraEdge, w,
                    fmt::format("input {} from {} has no IR edge", j, *got));
            else if (want && got && *want != *got)
                add(FindingKind::WrongInput, w,
                    fmt::format("input {} is {}, IR has {}", j, *got, *want));
        }
    }

    for (const auto &[wire, drv] : drivers) {
        if (wire.rfind(net.prefix, 0) != 0 || node_wires.count(wire))
            continue;
        add(FindingKind::ExtraWire, wire, "driven net without an IR node");
    }
    std::sort(rep.findings.begin(), rep.findings.end(),
              [](const Finding &a, const Finding &b) {
                  return std::tie(a.subject, a.detail) < std::tie(b.subject, b.detail);
              });
    return rep;
}

} // namespace

Report verify_structure(const ir::RoutingGraph &g, const StructNetlist &n) {
    return compare(g, n, {"d_", "d", "mux_"});
}

Report verify_valid_mirror(const ir::RoutingGraph &g, const StructNetlist &n) {
    auto rep = compare(g, n, {"v_", "vin", "vmux_"});
    std::unordered_map<std::string, const Instance *> by_name;
    for (const auto &inst : n.instances)
        by_name.emplace(inst.name, &inst);
    for (const auto &inst : n.instances) {
        if (inst.prim != Prim::Mux || inst.name.rfind("vmux_", 0) != 0)
            continue;
        auto it = by_name.find(inst.name.substr(1));
        const auto *vs = inst.pin("sel");
        const auto *ds = it == by_name.end() ? nullptr : it->second->pin("sel");
        if (!vs || !ds || !(*vs == *ds))
            rep.findings.push_back({FindingKind::SelectMismatch, inst.name,
                                    "valid mux does not share the data select"});
    }
    return rep;
}

std::string format_report(const Report &r) {
    std::string out = fmt::format("{}: {} nodes, {} edges, {} findings\n",
                                  r.pass() ? "PASS" : "FAIL", r.nodes_checked,
                                  r.edges_checked, r.findings.size());
    for (const auto &f : r.findings)
        out += fmt::format("  {} {}: {}\n", finding_name(f.kind), f.subject, f.detail);
    return out;
}

} // namespace interlace::rtl
