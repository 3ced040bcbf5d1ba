#include "interlace/pnr/app.hpp"

#include "interlace/error.hpp"
#include "interlace/util/text.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace interlace::pnr {

std::string_view kind_name(InstKind k) {
    switch (k) {
    case InstKind::Pe: return "pe";
    case InstKind::Mem: return "mem";
    case InstKind::Io: return "io";
    case InstKind::Const: return "const";
    case InstKind::Reg: return "reg";
    }
    return "?";
}

std::optional<InstKind> parse_kind(std::string_view s) {
    for (auto k : {InstKind::Pe, InstKind::Mem, InstKind::Io, InstKind::Const, InstKind::Reg})
        if (kind_name(k) == s)
            return k;
    return std::nullopt;
}

const std::vector<std::string> &input_ports(InstKind k) {
    static const std::vector<std::string> pe{"in0", "in1", "in2", "in3"};
    static const std::vector<std::string> mem{"in0", "in1"};
    static const std::vector<std::string> one{"in0"};
    static const std::vector<std::string> none;
    switch (k) {
    case InstKind::Pe: return pe;
    case InstKind::Mem: return mem;
    case InstKind::Io:
    case InstKind::Reg: return one;
    case InstKind::Const: return none;
    }
    return none;
}

const std::vector<std::string> &output_ports(InstKind k) {
    static const std::vector<std::string> pe{"out0", "out1"};
    static const std::vector<std::string> one{"out0"};
    return k == InstKind::Pe ? pe : one;
}

std::string to_string(const PortRef &p) { return p.inst + "." + p.port; }

const AppInstance *AppGraph::find(std::string_view name) const {
    for (const auto &i : instances)
        if (i.name == name)
            return &i;
    return nullptr;
}

const AppNet *AppGraph::net_driving(const PortRef &sink) const {
    for (const auto &n : nets)
        if (std::find(n.sinks.begin(), n.sinks.end(), sink) != n.sinks.end())
            return &n;
    return nullptr;
}

std::vector<const AppNet *> AppGraph::nets_from(std::string_view inst) const {
    std::vector<const AppNet *> out;
    for (const auto &n : nets)
        if (n.source.inst == inst)
            out.push_back(&n);
    return out;
}

void check_app(const AppGraph &a) {
    std::map<std::string, InstKind> kinds;
    for (const auto &i : a.instances)
        if (!kinds.emplace(i.name, i.kind).second)
            throw Error(Errc::InvalidGraph, fmt::format("duplicate instance '{}'", i.name));
    auto check_port = [&](const PortRef &p, bool output) {
        auto it = kinds.find(p.inst);
        if (it == kinds.end())
            throw Error(Errc::DanglingPort, fmt::format("{}: unknown instance", to_string(p)));
        const auto &ports = output ? output_ports(it->second) : input_ports(it->second);
        if (std::find(ports.begin(), ports.end(), p.port) == ports.end())
            throw Error(Errc::DanglingPort,
                        fmt::format("{}: {} has no {} port '{}'", to_string(p),
                                    kind_name(it->second), output ? "output" : "input",
                                    p.port));
    };
    std::set<PortRef> sources, sinks;
    for (const auto &n : a.nets) {
        check_port(n.source, true);
        if (n.sinks.empty())
            throw Error(Errc::DanglingPort, fmt::format("net {} has no sinks", n.name()));
        if (!sources.insert(n.source).second)
            throw Error(Errc::MultiplyDrivenNet,
                        fmt::format("two nets driven by {}", n.name()));
        for (const auto &s : n.sinks) {
            check_port(s, false);
            if (!sinks.insert(s).second)
                throw Error(Errc::MultiplyDrivenNet,
                            fmt::format("{} is driven by more than one net", to_string(s)));
        }
    }
}

namespace {

PortRef parse_ref(std::string_view s, int line, int col) {
    auto dot = s.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == s.size())
        throw ParseError(fmt::format("expected <inst>.<port>, got '{}'", s), line, col);
    return {std::string(s.substr(0, dot)), std::string(s.substr(dot + 1))};
}

} // namespace

AppGraph parse_app(std::string_view src) {
    AppGraph a;
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
        if (tok[0].text == "inst") {
            if (tok.size() < 3)
                throw ParseError("expected: inst <name> <kind> [key=value...]", line_no,
                                 tok[0].column);
            AppInstance inst;
            inst.name = std::string(tok[1].text);
            auto kind = parse_kind(tok[2].text);
            if (!kind)
                throw ParseError(fmt::format("unknown kind '{}'", tok[2].text), line_no,
                                 tok[2].column);
            inst.kind = *kind;
            for (size_t i = 3; i < tok.size(); ++i) {
                auto kv = text::split_key_value(tok[i].text);
                if (!kv)
                    throw ParseError(fmt::format("expected key=value, got '{}'", tok[i].text),
                                     line_no, tok[i].column);
                inst.attrs[std::string(kv->first)] = std::string(kv->second);
            }
            a.instances.push_back(std::move(inst));
        } else if (tok[0].text == "net") {
            if (tok.size() < 4 || tok[2].text != "->")
                throw ParseError("expected: net <inst.port> -> <inst.port>[,...]", line_no,
                                 tok[0].column);
            AppNet net;
            net.source = parse_ref(tok[1].text, line_no, tok[1].column);
            for (size_t i = 3; i < tok.size(); ++i)
                for (auto part : text::split(tok[i].text, ','))
                    if (!part.empty())
                        net.sinks.push_back(parse_ref(part, line_no, tok[i].column));
            a.nets.push_back(std::move(net));
        } else {
            throw ParseError(fmt::format("unknown statement '{}'", tok[0].text), line_no,
                             tok[0].column);
        }
    }
    check_app(a);
    return a;
}

std::string format_app(const AppGraph &a) {
    std::string out;
    for (const auto &i : a.instances) {
        out += fmt::format("inst {} {}", i.name, kind_name(i.kind));
        for (const auto &[k, v] : i.attrs)
            out += fmt::format(" {}={}", k, v);
        out += '\n';
    }
    for (const auto &n : a.nets) {
        out += fmt::format("net {} ->", n.name());
        for (size_t i = 0; i < n.sinks.size(); ++i)
            out += (i ? "," : " ") + to_string(n.sinks[i]);
        out += '\n';
    }
    return out;
}

const InputAnnotation *PackedGraph::annotation(std::string_view inst,
                                               std::string_view port) const {
    auto it = inputs.find(std::string(inst));
    if (it == inputs.end())
        return nullptr;
    auto jt = it->second.find(std::string(port));
    return jt == it->second.end() ? nullptr : &jt->second;
}

PackedGraph pack(const AppGraph &a) {
    PackedGraph p;
    p.app = a;
    return pack(p);
}

PackedGraph pack(const PackedGraph &in) {
    check_app(in.app);
    PackedGraph p = in;
    auto &app = p.app;

    std::vector<std::string> regs;
    for (const auto &i : app.instances)
        if (i.kind == InstKind::Reg)
            regs.push_back(i.name);
    std::sort(regs.begin(), regs.end());

    for (const auto &reg : regs) {
        auto out = std::find_if(app.nets.begin(), app.nets.end(),
                                [&](const AppNet &n) { return n.source.inst == reg; });
        if (out == app.nets.end() || out->sinks.size() != 1)
            continue;
        const PortRef target = out->sinks[0];
        const auto *ti = app.find(target.inst);
        if (!ti || ti->kind != InstKind::Pe)
            continue;
        if (const auto *ann = p.annotation(target.inst, target.port); ann && ann->reg)
            continue; // one register per PE input
        const PortRef reg_in{reg, "in0"};
        auto feed = std::find_if(app.nets.begin(), app.nets.end(), [&](const AppNet &n) {
            return std::find(n.sinks.begin(), n.sinks.end(), reg_in) != n.sinks.end();
        });
        const auto *reg_ann = p.annotation(reg, "in0");
        const bool const_fed = reg_ann && reg_ann->constant;
        if (feed == app.nets.end() && !const_fed)
            continue;
        auto &slot = p.inputs[target.inst][target.port];
        slot.reg = true;
        if (const_fed)
            slot.constant = reg_ann->constant;
        if (feed != app.nets.end())
            std::replace(feed->sinks.begin(), feed->sinks.end(), reg_in, target);
        app.nets.erase(std::find_if(app.nets.begin(), app.nets.end(),
                                    [&](const AppNet &n) { return n.source.inst == reg; }));
        p.inputs.erase(reg);
        std::erase_if(app.instances, [&](const AppInstance &i) { return i.name == reg; });
        p.absorbed_regs.push_back(reg);
    }

    std::vector<std::string> consts;
    for (const auto &i : app.instances)
        if (i.kind == InstKind::Const)
            consts.push_back(i.name);
    std::sort(consts.begin(), consts.end());
    for (const auto &c : consts) {
        const auto *inst = app.find(c);
        long long value = 0;
        if (auto it = inst->attrs.find("value"); it != inst->attrs.end())
            value = text::parse_int(it->second, 0, 0);
        for (const auto &n : app.nets)
            if (n.source.inst == c)
                for (const auto &s : n.sinks)
                    p.inputs[s.inst][s.port].constant = value;
        std::erase_if(app.nets, [&](const AppNet &n) { return n.source.inst == c; });
        std::erase_if(app.instances, [&](const AppInstance &i) { return i.name == c; });
        p.folded_consts.push_back(c);
    }
    return p;
}

} // namespace interlace::pnr
