#include "interlace/arch/spec.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <fmt/format.h>

namespace interlace::arch {

std::string_view topology_name(Topology t) {
    return t == Topology::Wilton ? "wilton" : "disjoint";
}

CoreSpec CoreSpec::uniform(std::string name, int num_in, int num_out,
                           int bitwidth, double delay) {
    CoreSpec c;
    c.name = std::move(name);
    for (int i = 0; i < num_in; ++i)
        c.inputs.push_back({fmt::format("in{}", i), bitwidth});
    for (int i = 0; i < num_out; ++i)
        c.outputs.push_back({fmt::format("out{}", i), bitwidth});
    c.delay = delay;
    return c;
}

SideSet sides_after_removal(int removed) {
    SideSet sides{Side::North, Side::East, Side::South, Side::West};
    const Side order[] = {Side::East, Side::South, Side::West, Side::North};
    for (int i = 0; i < removed && i < 4; ++i)
        sides.erase(order[i]);
    return sides;
}

bool is_boundary(const ArchSpec &spec, int x, int y) {
    return x == 0 || y == 0 || x == spec.width - 1 || y == spec.height - 1;
}

bool is_mem_column(const ArchSpec &spec, int x) {
    if (spec.mem_column_stride <= 0)
        return false;
    return x % spec.mem_column_stride == spec.mem_column_stride / 2;
}

TileKind tile_kind(const ArchSpec &spec, int x, int y) {
    if (is_boundary(spec, x, y))
        return TileKind::Io;
    return is_mem_column(spec, x) ? TileKind::Mem : TileKind::Pe;
}

const std::optional<CoreSpec> &tile_core(const ArchSpec &spec, int x, int y) {
    switch (tile_kind(spec, x, y)) {
    case TileKind::Io: return spec.io_core;
    case TileKind::Mem: return spec.mem_core;
    case TileKind::Pe: break;
    }
    return spec.pe_core;
}

void check_spec(const ArchSpec &spec) {
    auto fail = [](const std::string &msg) {
        throw Error(Errc::InvalidSpec, msg);
    };
    if (spec.width < 1 || spec.height < 1)
        fail("array width and height must be >= 1");
    if (spec.layers.empty())
        fail("at least one layer is required");
    std::set<int> widths;
    for (const auto &l : spec.layers) {
        if (l.num_tracks < 1)
            fail(fmt::format("layer {}: tracks must be >= 1", l.bitwidth));
        if (l.bitwidth < 1)
            fail("layer bit width must be >= 1");
        if (l.reg_density < 0.0 || l.reg_density > 1.0)
            fail(fmt::format("layer {}: reg_density outside [0,1]",
                             l.bitwidth));
        if (!widths.insert(l.bitwidth).second)
            fail(fmt::format("layer {} declared twice", l.bitwidth));
    }
    if (spec.mem_column_stride < 0)
        fail("mem column_stride must be >= 0");
    for (const auto *core : {&spec.pe_core, &spec.mem_core, &spec.io_core}) {
        if (!*core)
            continue;
        const auto &c = **core;
        if (c.inputs.empty() && c.outputs.empty())
            fail(fmt::format("core '{}' has no ports", c.name));
        std::set<std::string> names;
        for (const auto *list : {&c.inputs, &c.outputs})
            for (const auto &p : *list) {
                if (!names.insert(p.name).second)
                    fail(fmt::format("core '{}': duplicate port '{}'", c.name,
                                     p.name));
                if (!widths.count(p.bitwidth))
                    fail(fmt::format("core '{}': port '{}' has no {}-bit layer",
                                     c.name, p.name, p.bitwidth));
            }
        if (c.delay < 0)
            fail(fmt::format("core '{}': negative delay", c.name));
    }
    if (spec.policy.cb_sides.empty() || spec.policy.sb_out_sides.empty())
        throw Error(Errc::EmptyPolicy, "port policy sides must be non-empty");
    if (spec.wire_delay < 0 || spec.mux_delay < 0 || spec.reg_delay < 0)
        fail("delays must be non-negative");
}

namespace {

struct Cursor {
    int line;
    int column;
};

[[noreturn]] void fail_at(const Cursor &c, const std::string &msg) {
    throw ParseError(msg, c.line, c.column);
}

SideSet parse_sides(std::string_view v, const Cursor &c) {
    SideSet out;
    for (auto part : text::split(v, ',')) {
        auto s = ir::parse_side(part);
        if (!s)
            fail_at(c, fmt::format("unknown side '{}'", part));
        out.insert(*s);
    }
    return out;
}

std::set<int> parse_tracks(std::string_view v, const Cursor &c) {
    std::set<int> out;
    if (v == "all")
        return out;
    for (auto part : text::split(v, ','))
        out.insert(static_cast<int>(text::parse_int(part, c.line, c.column)));
    return out;
}

// "4x16,2x1" -> ports named <prefix>0..
std::vector<PortSpec> parse_ports(std::string_view v, std::string_view prefix,
                                  const Cursor &c) {
    std::vector<PortSpec> out;
    if (v == "0" || v == "-")
        return out;
    for (auto group : text::split(v, ',')) {
        auto x = group.find('x');
        if (x == std::string_view::npos)
            fail_at(c, fmt::format("expected <count>x<bits>, got '{}'", group));
        auto count = text::parse_int(group.substr(0, x), c.line, c.column);
        auto bits = text::parse_int(group.substr(x + 1), c.line, c.column);
        for (long long i = 0; i < count; ++i)
            out.push_back({fmt::format("{}{}", prefix, out.size()),
                           static_cast<int>(bits)});
    }
    return out;
}

std::string format_ports(const std::vector<PortSpec> &ports) {
    if (ports.empty())
        return "0";
    std::string out;
    size_t i = 0;
    while (i < ports.size()) {
        size_t j = i;
        while (j < ports.size() && ports[j].bitwidth == ports[i].bitwidth)
            ++j;
        if (!out.empty())
            out += ',';
        out += fmt::format("{}x{}", j - i, ports[i].bitwidth);
        i = j;
    }
    return out;
}

std::string format_sides(const SideSet &sides) {
    std::string out;
    for (auto s : sides) {
        if (!out.empty())
            out += ',';
        out += ir::side_letter(s);
    }
    return out;
}

std::string format_tracks(const std::set<int> &tracks) {
    if (tracks.empty())
        return "all";
    std::string out;
    for (int t : tracks) {
        if (!out.empty())
            out += ',';
        out += std::to_string(t);
    }
    return out;
}

} // namespace

ArchSpec parse_arch_spec(std::string_view src) {
    ArchSpec spec;
    std::string section;
    LayerSpec *layer = nullptr;
    bool layers_reset = false;
    std::optional<CoreSpec> *core = nullptr;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= src.size()) {
        auto nl = src.find('\n', pos);
        auto line = src.substr(pos, nl == std::string_view::npos
                                        ? std::string_view::npos
                                        : nl - pos);
        pos = nl == std::string_view::npos ? src.size() + 1 : nl + 1;
        ++line_no;
        auto tokens = text::tokenize(line);
        for (const auto &tok : tokens) {
            Cursor cur{line_no, tok.column};
            auto t = tok.text;
            if (t.front() == '[') {
                if (t.back() != ']')
                    fail_at(cur, "section header must end with ']'");
                section = std::string(t.substr(1, t.size() - 2));
                layer = nullptr;
                core = nullptr;
                if (section.rfind("layer.", 0) == 0) {
                    if (!layers_reset) {
                        spec.layers.clear();
                        layers_reset = true;
                    }
                    LayerSpec l;
                    l.bitwidth = static_cast<int>(text::parse_int(
                        std::string_view(section).substr(6), line_no,
                        tok.column + 7));
                    spec.layers.push_back(l);
                    layer = &spec.layers.back();
                } else if (section == "core.pe") {
                    core = &spec.pe_core;
                } else if (section == "core.mem") {
                    core = &spec.mem_core;
                } else if (section == "core.io") {
                    core = &spec.io_core;
                } else if (section != "array" && section != "policy" &&
                           section != "mem" && section != "timing") {
                    fail_at(cur, fmt::format("unknown section [{}]", section));
                }
                if (core) {
                    auto name = section.substr(5);
                    *core = CoreSpec{name, {}, {}, 0.0};
                }
                continue;
            }
            if (section.empty())
                fail_at(cur, "key outside a section");
            if (core && t == "none") {
                core->reset();
                continue;
            }
            auto kv = text::split_key_value(t);
            if (!kv)
                fail_at(cur, fmt::format("expected key=value, got '{}'", t));
            auto [key, value] = *kv;
            auto num = [&] { return text::parse_double(value, line_no, tok.column + key.size() + 1); };
            auto integer = [&] {
                return static_cast<int>(text::parse_int(value, line_no, tok.column + key.size() + 1));
            };
            bool ok = true;
            if (section == "array") {
                if (key == "width") spec.width = integer();
                else if (key == "height") spec.height = integer();
                else ok = false;
            } else if (layer) {
                if (key == "tracks") layer->num_tracks = integer();
                else if (key == "reg_density") layer->reg_density = num();
                else if (key == "topology") {
                    if (value == "wilton") layer->topology = Topology::Wilton;
                    else if (value == "disjoint") layer->topology = Topology::Disjoint;
                    else fail_at(cur, fmt::format("unknown topology '{}'", value));
                } else ok = false;
            } else if (core) {
                if (!*core)
                    fail_at(cur, "core was declared 'none'");
                if (key == "in") (*core)->inputs = parse_ports(value, "in", cur);
                else if (key == "out") (*core)->outputs = parse_ports(value, "out", cur);
                else if (key == "delay") (*core)->delay = num();
                else ok = false;
            } else if (section == "policy") {
                if (key == "cb_sides") spec.policy.cb_sides = parse_sides(value, cur);
                else if (key == "sb_out_sides") spec.policy.sb_out_sides = parse_sides(value, cur);
                else if (key == "cb_tracks") spec.policy.cb_tracks = parse_tracks(value, cur);
                else if (key == "sb_out_tracks") spec.policy.sb_out_tracks = parse_tracks(value, cur);
                else ok = false;
            } else if (section == "mem") {
                if (key == "column_stride") spec.mem_column_stride = integer();
                else ok = false;
            } else if (section == "timing") {
                if (key == "wire") spec.wire_delay = num();
                else if (key == "mux") spec.mux_delay = num();
                else if (key == "reg") spec.reg_delay = num();
                else ok = false;
            }
            if (!ok)
                fail_at(cur, fmt::format("unknown key '{}' in [{}]", key, section));
        }
    }
    return spec;
}

std::string format_arch_spec(const ArchSpec &spec) {
    std::string out = fmt::format("[array] width={} height={}\n", spec.width,
                                  spec.height);
    for (const auto &l : spec.layers)
        out += fmt::format("[layer.{}] tracks={} topology={} reg_density={}\n",
                           l.bitwidth, l.num_tracks, topology_name(l.topology),
                           text::format_number(l.reg_density));
    for (const auto &[name, core] :
         {std::pair{"pe", &spec.pe_core}, std::pair{"mem", &spec.mem_core},
          std::pair{"io", &spec.io_core}}) {
        if (!*core) {
            out += fmt::format("[core.{}] none\n", name);
            continue;
        }
        out += fmt::format("[core.{}] in={} out={} delay={}\n", name,
                           format_ports((*core)->inputs),
                           format_ports((*core)->outputs),
                           text::format_number((*core)->delay));
    }
    out += fmt::format("[policy] cb_sides={} sb_out_sides={} cb_tracks={} "
                       "sb_out_tracks={}\n",
                       format_sides(spec.policy.cb_sides),
                       format_sides(spec.policy.sb_out_sides),
                       format_tracks(spec.policy.cb_tracks),
                       format_tracks(spec.policy.sb_out_tracks));
    out += fmt::format("[mem] column_stride={}\n", spec.mem_column_stride);
    out += fmt::format("[timing] wire={} mux={} reg={}\n",
                       text::format_number(spec.wire_delay),
                       text::format_number(spec.mux_delay),
                       text::format_number(spec.reg_delay));
    return out;
}

} // namespace interlace::arch
