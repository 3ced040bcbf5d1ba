#include "interlace/rtl/verilog.hpp"

#include "interlace/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace interlace::rtl {

namespace {

using Tile = std::pair<int, int>; // (y, x) so that maps iterate in raster order

std::string tile_module(const Tile &t) {
    return fmt::format("tile_x{}_y{}", t.second, t.first);
}

std::string range(int width) {
    return width > 1 ? fmt::format("[{}:0] ", width - 1) : std::string();
}

std::string ref_text(const PinRef &r) {
    if (!r.sliced())
        return r.wire;
    return fmt::format("{}[{}:{}]", r.wire, r.hi, r.lo);
}

std::string instance_text(const Instance &inst) {
    std::string out = "    " + prim_type_name(inst.prim, inst.core);
    if (!inst.params.empty()) {
        out += " #(";
        bool first = true;
        for (const auto &[k, v] : inst.params) {
            out += fmt::format("{}.{}({})", first ? "" : ", ", k, v);
            first = false;
        }
        out += ")";
    }
    out += " " + inst.name + " (";
    for (size_t i = 0; i < inst.pins.size(); ++i)
        out += fmt::format("{}.{}({})", i ? ", " : "", inst.pins[i].name,
                           ref_text(inst.pins[i].ref));
    return out + ");\n";
}

struct Port {
    bool output = false;
    int width = 1;
};

struct TileBody {
    std::map<std::string, Port> ports;
    std::map<std::string, int> wires;
    std::vector<const Instance *> instances;
    std::vector<const Assign *> assigns;
};

} // namespace

std::string emit_rtl(const StructNetlist &n) {
    std::string out = "// interlace structural netlist\n";
    std::map<std::string, int> width;
    for (const auto &w : n.wires)
        width[w.name] = w.width;

    std::map<Tile, TileBody> tiles;
    std::map<std::string, std::set<Tile>> touch;
    std::map<std::string, Tile> driver_tile;
    for (const auto &inst : n.instances) {
        Tile t{inst.y(), inst.x()};
        tiles[t].instances.push_back(&inst);
        for (const auto &p : inst.pins) {
            touch[p.ref.wire].insert(t);
            if (pin_is_output(inst, p.name))
                driver_tile.emplace(p.ref.wire, t);
        }
    }
    for (const auto &a : n.assigns) {
        Tile t{a.y, a.x};
        tiles[t].assigns.push_back(&a);
        touch[a.lhs].insert(t);
        touch[a.rhs.wire].insert(t);
        driver_tile.emplace(a.lhs, t);
    }

    std::map<std::string, int> top_wires;
    auto width_of = [&](const std::string &w) {
        auto it = width.find(w);
        return it == width.end() ? 1 : it->second;
    };
    for (const auto &w : n.wires)
        if (!touch.count(w.name))
            top_wires[w.name] = w.width;
    for (const auto &[w, ts] : touch) {
        if (ts.size() == 1) {
            tiles[*ts.begin()].wires[w] = width_of(w);
            continue;
        }
        top_wires[w] = width_of(w);
        auto d = driver_tile.find(w);
        for (const auto &t : ts)
            tiles[t].ports[w] = {d != driver_tile.end() && d->second == t, width_of(w)};
    }

    for (auto &[t, body] : tiles) {
        out += "\nmodule " + tile_module(t) + " (";
        bool first = true;
        for (const auto &[name, port] : body.ports) {
            out += fmt::format("{}\n    {} {}{}", first ? "" : ",",
                               port.output ? "output" : "input", range(port.width), name);
            first = false;
        }
        out += body.ports.empty() ? ");\n" : "\n);\n";
        for (const auto &[name, w] : body.wires)
            out += fmt::format("    wire {}{};\n", range(w), name);
        std::sort(body.assigns.begin(), body.assigns.end(),
                  [](const Assign *a, const Assign *b) { return a->lhs < b->lhs; });
        for (const auto *a : body.assigns)
            out += fmt::format("    assign {} = {};\n", a->lhs, ref_text(a->rhs));
        std::sort(body.instances.begin(), body.instances.end(),
                  [](const Instance *a, const Instance *b) { return a->name < b->name; });
        for (const auto *inst : body.instances)
            out += instance_text(*inst);
        out += "endmodule\n";
    }

    out += "\nmodule top;\n";
    for (const auto &[name, w] : top_wires)
        out += fmt::format("    wire {}{};\n", range(w), name);
    for (const auto &[t, body] : tiles) {
        out += fmt::format("    {} u_{} (", tile_module(t), tile_module(t));
        bool first = true;
        for (const auto &[name, port] : body.ports) {
            out += fmt::format("{}.{}({})", first ? "" : ", ", name, name);
            first = false;
        }
        out += ");\n";
    }
    out += "endmodule\n";
    return out;
}

namespace {

struct Tok {
    enum Kind { Id, Num, Sym, End } kind = End;
    std::string text;
    int line = 0;
    int col = 0;
};

std::vector<Tok> lex(std::string_view s) {
    std::vector<Tok> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t k) {
        for (size_t j = 0; j < k && i < s.size(); ++j, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
        } else if (s.substr(i, 2) == "//") {
            while (i < s.size() && s[i] != '\n')
                advance(1);
        } else if (s.substr(i, 2) == "/*") {
            int l = line, cl = col;
            auto end = s.find("*/", i + 2);
            if (end == std::string_view::npos)
                throw ParseError("unterminated comment", l, cl);
            advance(end + 2 - i);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                    s[j] == '_' || s[j] == '$'))
                ++j;
            out.push_back({Tok::Id, std::string(s.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                ++j;
            out.push_back({Tok::Num, std::string(s.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (std::string_view("()[]:;,.#=").find(c) != std::string_view::npos) {
            out.push_back({Tok::Sym, std::string(1, c), line, col});
            advance(1);
        } else {
            throw ParseError(fmt::format("unexpected character '{}'", c), line, col);
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

struct RawInst {
    std::string type;
    std::map<std::string, long long> params;
    std::string name;
    std::vector<Pin> pins;
    int line = 0, col = 0;
};

struct Module {
    std::string name;
    std::vector<std::pair<std::string, int>> ports;
    std::vector<Wire> wires;
    std::vector<Assign> assigns;
    std::vector<RawInst> instances;
};

class Parser {
public:
    explicit Parser(std::vector<Tok> toks) : t_(std::move(toks)) {}

    std::vector<Module> file() {
        std::vector<Module> mods;
        while (peek().kind != Tok::End)
            mods.push_back(module());
        if (mods.empty())
            throw ParseError("no module found", peek().line, peek().col);
        return mods;
    }

private:
    std::vector<Tok> t_;
    size_t p_ = 0;

    const Tok &peek() const { return t_[p_]; }
    const Tok &next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }

    [[noreturn]] void fail(const Tok &t, const std::string &msg) {
        throw ParseError(msg, t.line, t.col);
    }
    bool at(std::string_view sym) const {
        return peek().kind == Tok::Sym && peek().text == sym;
    }
    void expect(std::string_view sym) {
        const auto &t = next();
        if (t.kind != Tok::Sym || t.text != sym)
            fail(t, fmt::format("expected '{}', got '{}'", sym,
                                t.kind == Tok::End ? "end of file" : t.text));
    }
    std::string ident() {
        const auto &t = next();
        if (t.kind != Tok::Id)
            fail(t, fmt::format("expected identifier, got '{}'",
                                t.kind == Tok::End ? "end of file" : t.text));
        return t.text;
    }
    long long number() {
        const auto &t = next();
        long long v = 0;
        if (t.kind != Tok::Num ||
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v).ec != std::errc{})
            fail(t, fmt::format("expected number, got '{}'", t.text));
        return v;
    }
    std::pair<int, int> slice() {
        expect("[");
        int hi = static_cast<int>(number());
        expect(":");
        int lo = static_cast<int>(number());
        expect("]");
        return {hi, lo};
    }
    int width_range() {
        if (!at("["))
            return 1;
        const auto &t = peek();
        auto [hi, lo] = slice();
        if (lo != 0 || hi < 0)
            fail(t, "ranges must be [N:0]");
        return hi + 1;
    }
    PinRef ref() {
        PinRef r{ident()};
        if (at("[")) {
            auto [hi, lo] = slice();
            r.hi = hi;
            r.lo = lo;
        }
        return r;
    }

    Module module() {
        const auto &kw = next();
        if (kw.kind != Tok::Id || kw.text != "module")
            fail(kw, fmt::format("expected 'module', got '{}'", kw.text));
        Module m;
        m.name = ident();
        if (at("(")) {
            next();
            while (!at(")")) {
                const auto &dir = next();
                if (dir.kind != Tok::Id || (dir.text != "input" && dir.text != "output"))
                    fail(dir, "expected 'input' or 'output'");
                int w = width_range();
                m.ports.push_back({ident(), w});
                if (!at(")"))
                    expect(",");
            }
            next();
        }
        expect(";");
        while (true) {
            const auto &t = peek();
            if (t.kind == Tok::End)
                fail(t, fmt::format("module '{}' is missing 'endmodule'", m.name));
            if (t.kind != Tok::Id)
                fail(t, fmt::format("unexpected '{}'", t.text));
            if (t.text == "endmodule") {
                next();
                return m;
            }
            if (t.text == "wire") {
                next();
                int w = width_range();
                m.wires.push_back({ident(), w});
                while (at(",")) {
                    next();
                    m.wires.push_back({ident(), w});
                }
                expect(";");
            } else if (t.text == "assign") {
                next();
                Assign a;
                a.lhs = ident();
                expect("=");
                a.rhs = ref();
                expect(";");
                m.assigns.push_back(std::move(a));
            } else {
                m.instances.push_back(instance());
            }
        }
    }

    RawInst instance() {
        RawInst r;
        r.line = peek().line;
        r.col = peek().col;
        r.type = ident();
        if (at("#")) {
            next();
            expect("(");
            while (!at(")")) {
                expect(".");
                auto key = ident();
                expect("(");
                r.params[key] = number();
                expect(")");
                if (!at(")"))
                    expect(",");
            }
            next();
        }
        r.name = ident();
        expect("(");
        while (!at(")")) {
            expect(".");
            auto pin = ident();
            expect("(");
            if (!at(")"))
                r.pins.push_back({pin, ref()});
            expect(")");
            if (!at(")"))
                expect(",");
        }
        next();
        expect(";");
        return r;
    }
};

bool tile_coords(const std::string &name, int &x, int &y) {
    return std::sscanf(name.c_str(), "tile_x%d_y%d", &x, &y) == 2;
}

} // namespace

StructNetlist parse_rtl(std::string_view text) {
    auto mods = Parser(lex(text)).file();
    std::unordered_map<std::string, const Module *> by_name;
    for (const auto &m : mods)
        by_name[m.name] = &m;
    const Module *top = by_name.count("top") ? by_name["top"] : &mods.back();

    StructNetlist n;
    std::map<std::string, int> wires;
    auto declare = [&](const std::string &name, int width) {
        wires.try_emplace(name, width);
    };

    auto add_instance = [&](const RawInst &r, const std::map<std::string, std::string> &rename) {
        Instance inst;
        auto prim = parse_prim_type(r.type, inst.core);
        if (!prim)
            throw Error(Errc::UnknownPrimitive,
                        fmt::format("{}:{}: unknown primitive '{}'", r.line, r.col, r.type));
        inst.prim = *prim;
        inst.name = r.name;
        inst.params = r.params;
        for (auto pin : r.pins) {
            auto it = rename.find(pin.ref.wire);
            if (it != rename.end())
                pin.ref.wire = it->second;
            declare(pin.ref.wire, 1); // implicit net
            inst.pins.push_back(std::move(pin));
        }
        n.instances.push_back(std::move(inst));
    };

    auto flatten = [&](const Module &m, const std::map<std::string, std::string> &rename,
                       int x, int y) {
        for (const auto &w : m.wires)
            declare(w.name, w.width);
        for (auto a : m.assigns) {
            if (auto it = rename.find(a.lhs); it != rename.end())
                a.lhs = it->second;
            if (auto it = rename.find(a.rhs.wire); it != rename.end())
                a.rhs.wire = it->second;
            declare(a.lhs, 1);
            declare(a.rhs.wire, 1);
            a.x = x;
            a.y = y;
            n.assigns.push_back(std::move(a));
        }
        for (const auto &r : m.instances)
            add_instance(r, rename);
    };

    for (const auto &w : top->wires)
        declare(w.name, w.width);
    std::vector<const RawInst *> prims;
    for (const auto &r : top->instances) {
        auto it = by_name.find(r.type);
        if (it == by_name.end() || it->second == top) {
            prims.push_back(&r);
            continue;
        }
        const Module &sub = *it->second;
        std::map<std::string, std::string> rename;
        for (const auto &p : r.pins) {
            if (p.ref.sliced())
                throw ParseError("sliced hierarchical connections are not supported",
                                 r.line, r.col);
            rename[p.name] = p.ref.wire;
        }
        for (const auto &[port, width] : sub.ports) {
            auto it2 = rename.find(port);
            declare(it2 == rename.end() ? port : it2->second, width);
        }
        int x = 0, y = 0;
        tile_coords(sub.name, x, y);
        flatten(sub, rename, x, y);
    }
    Module top_only;
    top_only.assigns = top->assigns;
    for (const auto *r : prims)
        top_only.instances.push_back(*r);
    flatten(top_only, {}, 0, 0);

    for (const auto &[name, w] : wires)
        n.wires.push_back({name, w});
    return n;
}

} // namespace interlace::rtl
