#include "interlace/rtl/netlist.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace interlace::rtl {

std::string prim_type_name(Prim p, std::string_view core) {
    switch (p) {
    case Prim::Mux: return "MUX";
    case Prim::Reg: return "REG";
    case Prim::FifoReg: return "FIFO_REG";
    case Prim::CfgReg: return "CFG_REG";
    case Prim::Core: return fmt::format("CORE_{}", core);
    case Prim::Const: return "CONST";
    case Prim::Join: return "RDY_JOIN";
    }
    return "?";
}

std::optional<Prim> parse_prim_type(std::string_view type, std::string &core) {
    if (type == "MUX") return Prim::Mux;
    if (type == "REG") return Prim::Reg;
    if (type == "FIFO_REG") return Prim::FifoReg;
    if (type == "CFG_REG") return Prim::CfgReg;
    if (type == "CONST") return Prim::Const;
    if (type == "RDY_JOIN") return Prim::Join;
    if (type.size() > 5 && type.substr(0, 5) == "CORE_") {
        core = std::string(type.substr(5));
        return Prim::Core;
    }
    return std::nullopt;
}

const PinRef *Instance::pin(std::string_view pin_name) const {
    for (const auto &p : pins)
        if (p.name == pin_name)
            return &p.ref;
    return nullptr;
}

long long Instance::param(std::string_view key, long long fallback) const {
    auto it = params.find(std::string(key));
    return it == params.end() ? fallback : it->second;
}

bool pin_is_output(const Instance &inst, std::string_view p) {
    switch (inst.prim) {
    case Prim::Mux: return p == "out" || p == "oh";
    case Prim::Reg: return p == "q";
    case Prim::FifoReg:
        return p == "q" || p == "vout" || p == "rout" || p == "ctl_out";
    case Prim::CfgReg: return p == "q";
    case Prim::Core: return p.substr(0, 2) == "o_";
    case Prim::Const: return p == "out";
    case Prim::Join: return p == "out";
    }
    return false;
}

std::string_view meaning_name(FieldMeaning m) {
    switch (m) {
    case FieldMeaning::MuxSelect: return "mux_select";
    case FieldMeaning::FifoMode: return "fifo_mode";
    case FieldMeaning::SplitFifoRole: return "split_fifo_role";
    case FieldMeaning::CoreConfig: return "core_config";
    }
    return "?";
}

uint32_t pack_address(int x, int y, int feature, int reg) {
    return (static_cast<uint32_t>(x & 0xff) << 24) |
           (static_cast<uint32_t>(y & 0xff) << 16) |
           (static_cast<uint32_t>(feature & 0xff) << 8) |
           static_cast<uint32_t>(reg & 0xff);
}

DecodedAddress unpack_address(uint32_t a) {
    return {static_cast<int>(a >> 24), static_cast<int>((a >> 16) & 0xff),
            static_cast<int>((a >> 8) & 0xff), static_cast<int>(a & 0xff)};
}

uint32_t ConfigField::address() const { return pack_address(x, y, feature, reg); }

const Instance *StructNetlist::find_instance(std::string_view name) const {
    for (const auto &i : instances)
        if (i.name == name)
            return &i;
    return nullptr;
}

const Wire *StructNetlist::find_wire(std::string_view name) const {
    for (const auto &w : wires)
        if (w.name == name)
            return &w;
    return nullptr;
}

bool StructNetlist::structurally_equal(const StructNetlist &o) const {
    auto by_name = [](const Instance &a, const Instance &b) {
        return a.name < b.name;
    };
    auto a = instances, b = o.instances;
    std::sort(a.begin(), a.end(), by_name);
    std::sort(b.begin(), b.end(), by_name);
    if (a != b)
        return false;
    auto wa = wires, wb = o.wires;
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    if (wa != wb)
        return false;
    auto aa = assigns, ab = o.assigns;
    std::sort(aa.begin(), aa.end());
    std::sort(ab.begin(), ab.end());
    return aa == ab;
}

std::vector<WireConnectivity> wire_table(const StructNetlist &n) {
    std::vector<WireConnectivity> out;
    std::unordered_map<std::string, size_t> index;
    auto entry = [&](const std::string &w) -> WireConnectivity & {
        auto [it, fresh] = index.try_emplace(w, out.size());
        if (fresh)
            out.push_back({w, {}, {}});
        return out[it->second];
    };
    for (const auto &w : n.wires)
        entry(w.name);
    for (const auto &inst : n.instances)
        for (const auto &p : inst.pins) {
            auto &e = entry(p.ref.wire);
            if (pin_is_output(inst, p.name))
                e.drivers.push_back({inst.name, p.name});
            else
                e.sinks.push_back({inst.name, p.name});
        }
    for (const auto &a : n.assigns) {
        entry(a.lhs).drivers.push_back({"", a.rhs.wire});
        entry(a.rhs.wire).sinks.push_back({"", a.lhs});
    }
    return out;
}

std::vector<std::string> check_netlist(const StructNetlist &n) {
    std::vector<std::string> problems;
    std::set<std::string> names;
    for (const auto &i : n.instances)
        if (!names.insert(i.name).second)
            problems.push_back(fmt::format("duplicate instance {}", i.name));
    std::unordered_map<std::string, int> widths;
    for (const auto &w : n.wires)
        if (!widths.emplace(w.name, w.width).second)
            problems.push_back(fmt::format("duplicate wire {}", w.name));
    for (const auto &c : wire_table(n)) {
        if (!widths.count(c.wire))
            problems.push_back(fmt::format("undeclared wire {}", c.wire));
        if (c.drivers.size() != 1)
            problems.push_back(fmt::format("wire {} has {} drivers", c.wire,
                                           c.drivers.size()));
    }
    for (const auto &i : n.instances) {
        if (i.prim != Prim::Mux)
            continue;
        const long long k = i.param("K");
        long long data = 0;
        for (const auto &p : i.pins)
            if (p.name.size() > 2 && p.name.substr(0, 2) == "in")
                ++data;
        if (data != k)
            problems.push_back(fmt::format("{}: K={} but {} data inputs",
                                           i.name, k, data));
        const auto *sel = i.pin("sel");
        auto it = sel ? widths.find(sel->wire) : widths.end();
        int sw = sel && it != widths.end() ? sel->width_or(it->second) : -1;
        if (sw != select_width(static_cast<int>(k)))
            problems.push_back(fmt::format("{}: select width {} for K={}",
                                           i.name, sw, k));
    }
    std::map<uint32_t, std::vector<std::pair<int, int>>> spans;
    for (const auto &f : n.config) {
        if (f.bit_width < 1 || f.bit_offset < 0 ||
            f.bit_offset + f.bit_width > kConfigWordBits)
            problems.push_back(fmt::format("field {}.{} outside its word",
                                           f.target_inst, f.target_pin));
        spans[f.address()].push_back({f.bit_offset, f.bit_offset + f.bit_width});
    }
    for (auto &[addr, v] : spans) {
        std::sort(v.begin(), v.end());
        for (size_t i = 1; i < v.size(); ++i)
            if (v[i].first < v[i - 1].second)
                problems.push_back(
                    fmt::format("overlapping fields at {:08x}", addr));
    }
    return problems;
}

std::string data_wire(const ir::IrNode &n) { return "d_" + ir::node_name(n); }
std::string valid_wire(const ir::IrNode &n) { return "v_" + ir::node_name(n); }
std::string mux_instance(const ir::IrNode &n) { return "mux_" + ir::node_name(n); }
std::string reg_instance(const ir::IrNode &n) { return "reg_" + ir::node_name(n); }

std::string core_instance(int x, int y) { return fmt::format("core_x{}_y{}", x, y); }

std::string cfg_instance(int x, int y, int feature, int reg) {
    return fmt::format("cfgreg_x{}_y{}_f{}_r{}", x, y, feature, reg);
}

int select_width(int k) {
    int w = 0;
    while ((1 << w) < k)
        ++w;
    return w;
}

std::string_view fifo_mode_name(FifoMode m) {
    return m == FifoMode::Full2 ? "full2" : "split";
}

namespace {

FieldMeaning meaning_of_pin(std::string_view pin) {
    if (pin == "sel") return FieldMeaning::MuxSelect;
    if (pin == "mode") return FieldMeaning::FifoMode;
    if (pin == "role") return FieldMeaning::SplitFifoRole;
    return FieldMeaning::CoreConfig;
}

bool field_order(const ConfigField &a, const ConfigField &b) {
    return std::tuple(a.address(), a.bit_offset, a.target_inst, a.target_pin) <
           std::tuple(b.address(), b.bit_offset, b.target_inst, b.target_pin);
}

} // namespace

std::vector<ConfigField> extract_config_map(const StructNetlist &n) {
    std::unordered_map<std::string, const Instance *> cfg_by_wire;
    for (const auto &i : n.instances)
        if (i.prim == Prim::CfgReg)
            if (const auto *q = i.pin("q"))
                cfg_by_wire[q->wire] = &i;
    std::vector<ConfigField> out;
    for (const auto &i : n.instances) {
        if (i.prim == Prim::CfgReg)
            continue;
        for (const auto &p : i.pins) {
            auto it = cfg_by_wire.find(p.ref.wire);
            if (it == cfg_by_wire.end() || pin_is_output(i, p.name))
                continue;
            const auto &reg = *it->second;
            ConfigField f;
            f.x = reg.x();
            f.y = reg.y();
            f.feature = static_cast<int>(reg.param("FEATURE"));
            f.reg = static_cast<int>(reg.param("REG"));
            f.bit_offset = p.ref.sliced() ? p.ref.lo : 0;
            f.bit_width = p.ref.width_or(static_cast<int>(reg.param("W", 32)));
            f.meaning = meaning_of_pin(p.name);
            f.target_inst = i.name;
            f.target_pin = p.name;
            out.push_back(std::move(f));
        }
    }
    std::sort(out.begin(), out.end(), field_order);
    // A valid mux shares its data mux's select bits; keep one owner per span.
    std::vector<ConfigField> unique;
    for (auto &f : out) {
        if (!unique.empty() && unique.back().address() == f.address() &&
            unique.back().bit_offset == f.bit_offset &&
            unique.back().bit_width == f.bit_width)
            continue;
        unique.push_back(std::move(f));
    }
    return unique;
}

std::string format_config_map(const std::vector<ConfigField> &fields) {
    std::string out = "# interlace config map 1\n"
                      "# x y feature reg offset width meaning target\n";
    for (const auto &f : fields)
        out += fmt::format("{} {} {} {} {} {} {} {}.{}\n", f.x, f.y, f.feature,
                           f.reg, f.bit_offset, f.bit_width,
                           meaning_name(f.meaning), f.target_inst,
                           f.target_pin);
    return out;
}

std::vector<ConfigField> parse_config_map(std::string_view src) {
    std::vector<ConfigField> out;
    int line_no = 0;
    size_t pos = 0;
    while (pos < src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                 : nl - pos);
        pos = nl == std::string_view::npos ? src.size() : nl + 1;
        ++line_no;
        auto tok = text::tokenize(line);
        if (tok.empty())
            continue;
        if (tok.size() != 8)
            throw ParseError(fmt::format("expected 8 columns, got {}", tok.size()),
                             line_no, tok.front().column);
        auto num = [&](int i) {
            return static_cast<int>(
                text::parse_int(tok[i].text, line_no, tok[i].column));
        };
        ConfigField f;
        f.x = num(0);
        f.y = num(1);
        f.feature = num(2);
        f.reg = num(3);
        f.bit_offset = num(4);
        f.bit_width = num(5);
        bool known = false;
        for (auto m : {FieldMeaning::MuxSelect, FieldMeaning::FifoMode,
                       FieldMeaning::SplitFifoRole, FieldMeaning::CoreConfig})
            if (meaning_name(m) == tok[6].text) {
                f.meaning = m;
                known = true;
            }
        if (!known)
            throw ParseError(fmt::format("unknown meaning '{}'", tok[6].text),
                             line_no, tok[6].column);
        auto target = tok[7].text;
        auto dot = target.rfind('.');
        if (dot == std::string_view::npos)
            throw ParseError("target must be <instance>.<pin>", line_no,
                             tok[7].column);
        f.target_inst = std::string(target.substr(0, dot));
        f.target_pin = std::string(target.substr(dot + 1));
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace interlace::rtl
