#include "interlace/sim/bitstream.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace interlace::sim {

using ir::NodeId;
using rtl::ConfigField;
using rtl::FieldMeaning;

namespace {

bool is_mux_site(const ir::RoutingGraph &g, NodeId id) {
    return g.node(id).kind != ir::NodeKind::Register && g.fan_in(id).size() >= 2;
}

uint64_t mask_of(int width) { return width >= 64 ? ~0ULL : (1ULL << width) - 1; }

} // namespace

FieldIndex::FieldIndex(const ir::RoutingGraph &g, const std::vector<ConfigField> &map)
    : g_(&g), fields_(map) {
    for (size_t i = 0; i < fields_.size(); ++i) {
        by_pin_.emplace(std::pair{fields_[i].target_inst, fields_[i].target_pin}, i);
        addresses_.insert(fields_[i].address());
    }
    for (uint32_t i = 0; i < g.num_nodes(); ++i) {
        const auto &n = g.node(NodeId{i});
        if (n.kind == ir::NodeKind::Register)
            nodes_.emplace(rtl::reg_instance(n), NodeId{i});
        else if (g.fan_in(NodeId{i}).size() >= 2)
            nodes_.emplace(rtl::mux_instance(n), NodeId{i});
    }
}

const ConfigField *FieldIndex::find(std::string_view inst, std::string_view pin) const {
    auto it = by_pin_.find({std::string(inst), std::string(pin)});
    return it == by_pin_.end() ? nullptr : &fields_[it->second];
}

const ConfigField *FieldIndex::select_of(NodeId mux) const {
    return find(rtl::mux_instance(g_->node(mux)), "sel");
}

std::optional<NodeId> FieldIndex::node_of(std::string_view inst) const {
    auto it = nodes_.find(std::string(inst));
    if (it == nodes_.end())
        return std::nullopt;
    return it->second;
}

std::map<NodeId, int> tree_selections(const ir::RoutingGraph &g, const pnr::RouteSet &routes) {
    std::map<NodeId, int> out;
    for (const auto &[net, tree] : routes)
        for (const auto &[child, parent] : tree.parents()) {
            if (!is_mux_site(g, child))
                continue;
            auto fi = g.fan_in(child);
            auto it = std::find(fi.begin(), fi.end(), parent);
            if (it == fi.end())
                throw Error(Errc::InvalidGraph,
                            fmt::format("net {}: no edge into {}", net,
                                        ir::node_name(g.node(child))));
            out[child] = static_cast<int>(it - fi.begin());
        }
    return out;
}

std::vector<FieldValue> route_assignments(const ir::RoutingGraph &g, const FieldIndex &index,
                                          const pnr::RouteSet &routes,
                                          const pnr::PackedGraph &packed,
                                          const pnr::Placement &placement,
                                          const BitstreamOptions &options) {
    std::vector<FieldValue> out;
    auto need = [&](std::string_view inst, std::string_view pin) -> const ConfigField & {
        const auto *f = index.find(inst, pin);
        if (!f)
            throw Error(Errc::UnknownField,
                        fmt::format("config map has no field for {}.{}", inst, pin));
        return *f;
    };

    std::map<NodeId, std::string> owner;
    for (const auto &[net, tree] : routes) {
        for (auto n : tree.nodes()) {
            auto [it, fresh] = owner.emplace(n, net);
            if (!fresh && it->second != net)
                throw Error(Errc::FieldConflict,
                            fmt::format("{} is claimed by nets {} and {}",
                                        ir::node_name(g.node(n)), it->second, net));
        }
        for (const auto &[child, parent] : tree.parents()) {
            const auto &node = g.node(child);
            if (node.kind == ir::NodeKind::Register && options.fifo_enable) {
                const auto name = rtl::reg_instance(node);
                if (const auto *mode = index.find(name, "mode"))
                    out.push_back({*mode, 1});
                if (const auto *role = index.find(name, "role")) {
                    // Position within the run of registers along the path.
                    int before = 0;
                    for (auto n : tree.path_to(child))
                        if (n != child && g.node(n).kind == ir::NodeKind::Register)
                            ++before;
                    const int chain = std::max(1, options.split_chain_depth);
                    out.push_back({*role, static_cast<uint64_t>(before % chain + 1)});
                }
            }
        }
    }
    for (const auto &[node, sel] : tree_selections(g, routes))
        out.push_back({need(rtl::mux_instance(g.node(node)), "sel"),
                       static_cast<uint64_t>(sel)});

    // Core operand configuration from packing.
    for (const auto &inst : packed.app.instances) {
        const auto &[x, y] = placement.at(inst.name);
        const auto core = rtl::core_instance(x, y);
        if (inst.kind == pnr::InstKind::Reg)
            out.push_back({need(core, "c_in0_reg_en"), 1});
        auto it = packed.inputs.find(inst.name);
        if (it == packed.inputs.end())
            continue;
        for (const auto &[port, ann] : it->second) {
            if (ann.reg)
                out.push_back({need(core, fmt::format("c_{}_reg_en", port)), 1});
            if (ann.constant) {
                out.push_back({need(core, fmt::format("c_{}_const_en", port)), 1});
                const auto &f = need(core, fmt::format("c_{}_const", port));
                out.push_back({f, static_cast<uint64_t>(*ann.constant) & mask_of(f.bit_width)});
            }
        }
    }
    return out;
}

Bitstream pack_words(const std::vector<FieldValue> &values, const FieldIndex &index,
                     bool include_defaults) {
    std::map<uint32_t, uint32_t> words;
    if (include_defaults)
        for (const auto &f : index.fields())
            words.emplace(f.address(), 0);
    std::map<std::pair<uint32_t, int>, uint64_t> seen;
    for (const auto &[f, value] : values) {
        auto [it, fresh] = seen.emplace(std::pair{f.address(), f.bit_offset}, value);
        if (!fresh && it->second != value)
            throw Error(Errc::FieldConflict,
                        fmt::format("{}.{} set to both {} and {}", f.target_inst, f.target_pin,
                                    it->second, value));
        if (value > mask_of(f.bit_width))
            throw Error(Errc::SelectOutOfRange,
                        fmt::format("{} does not fit {}.{} ({} bits)", value, f.target_inst,
                                    f.target_pin, f.bit_width));
        words[f.address()] |= static_cast<uint32_t>(value << f.bit_offset);
    }
    Bitstream out;
    for (const auto &[a, d] : words)
        if (include_defaults || d != 0)
            out.push_back({a, d});
    return out;
}

Bitstream generate_bitstream(const ir::RoutingGraph &g, const std::vector<ConfigField> &map,
                             const pnr::RouteSet &routes, const pnr::PackedGraph &packed,
                             const pnr::Placement &placement, const BitstreamOptions &options) {
    FieldIndex index(g, map);
    return pack_words(route_assignments(g, index, routes, packed, placement, options), index,
                      options.include_defaults);
}

ConfiguredFabric configure(const ir::RoutingGraph &g, const std::vector<ConfigField> &map,
                           const Bitstream &b) {
    return configure(FieldIndex(g, map), b);
}

ConfiguredFabric configure(const FieldIndex &index, const Bitstream &b) {
    const auto &g = index.graph();
    const auto &map = index.fields();
    std::map<uint32_t, uint32_t> words;
    for (const auto &w : b) {
        if (!index.known_address(w.address)) {
            auto a = rtl::unpack_address(w.address);
            throw Error(Errc::BadAddress,
                        fmt::format("address {:08X} (x {}, y {}, feature {}, reg {}) is not "
                                    "in the config map",
                                    w.address, a.x, a.y, a.feature, a.reg));
        }
        words[w.address] |= w.data;
    }
    ConfiguredFabric f;
    f.graph = &g;
    for (uint32_t i = 0; i < g.num_nodes(); ++i)
        if (is_mux_site(g, NodeId{i}))
            f.select[NodeId{i}] = 0;
    for (const auto &field : map) {
        auto it = words.find(field.address());
        const uint64_t data = it == words.end() ? 0 : it->second;
        const uint64_t value = (data >> field.bit_offset) & mask_of(field.bit_width);
        switch (field.meaning) {
        case FieldMeaning::MuxSelect: {
            auto node = index.node_of(field.target_inst);
            if (!node)
                break; // valid mux sharing a data select
            const auto k = g.fan_in(*node).size();
            if (value >= k)
                throw Error(Errc::SelectOutOfRange,
                            fmt::format("{} selects input {} of {}", field.target_inst, value,
                                        k));
            f.select[*node] = static_cast<int>(value);
            break;
        }
        case FieldMeaning::FifoMode:
            if (auto node = index.node_of(field.target_inst))
                f.fifo_mode[*node] = static_cast<int>(value);
            break;
        case FieldMeaning::SplitFifoRole:
            if (auto node = index.node_of(field.target_inst))
                f.fifo_role[*node] = static_cast<int>(value);
            break;
        case FieldMeaning::CoreConfig:
            f.core[{field.x, field.y}][field.target_pin] = value;
            break;
        }
    }
    return f;
}

std::string format_bitstream(const Bitstream &b) {
    std::string out;
    for (const auto &w : b)
        out += fmt::format("{:08X} {:08X}\n", w.address, w.data);
    return out;
}

Bitstream parse_bitstream(std::string_view src) {
    Bitstream out;
    int line_no = 0;
    size_t pos = 0;
    auto hex = [&](const text::Token &t) {
        if (t.text.size() != 8)
            throw ParseError(fmt::format("expected 8 hex digits, got '{}'", t.text), line_no,
                             t.column);
        uint32_t v = 0;
        for (char c : t.text) {
            int d = 0;
            if (c >= '0' && c <= '9')
                d = c - '0';
            else if (c >= 'A' && c <= 'F')
                d = c - 'A' + 10;
            else if (c >= 'a' && c <= 'f')
                d = c - 'a' + 10;
            else
                throw ParseError(fmt::format("bad hex digit '{}'", c), line_no, t.column);
            v = (v << 4) | static_cast<uint32_t>(d);
        }
        return v;
    };
    while (pos < src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                 : nl - pos);
        pos = nl == std::string_view::npos ? src.size() : nl + 1;
        ++line_no;
        auto tok = text::tokenize(line);
        if (tok.empty())
            continue;
        if (tok.size() != 2)
            throw ParseError("expected: ADDR DATA", line_no, tok[0].column);
        Word w{hex(tok[0]), hex(tok[1])};
        if (!out.empty() && w.address <= out.back().address)
            throw ParseError("addresses must be unique and ascending", line_no, tok[0].column);
        out.push_back(w);
    }
    return out;
}

} // namespace interlace::sim
