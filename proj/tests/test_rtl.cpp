#include "doctest.h"

#include "interlace/arch/builder.hpp"
#include "interlace/error.hpp"
#include "interlace/rtl/area.hpp"
#include "interlace/rtl/netlist.hpp"
#include "interlace/rtl/ready_join.hpp"
#include "interlace/rtl/verify.hpp"
#include "interlace/rtl/verilog.hpp"
#include "interlace/util/text.hpp"

#include <bit>
#include <map>

using namespace interlace;
using namespace interlace::rtl;
using arch::ArchSpec;
using arch::LayerSpec;
using arch::Topology;
using ir::Io;
using ir::IrNode;
using ir::NodeId;
using ir::Side;

namespace {

ArchSpec fabric(int w, int h, int tracks, Topology topo, double density = 0.0) {
    ArchSpec s;
    s.width = w;
    s.height = h;
    s.layers = {LayerSpec{16, tracks, topo, density}};
    return s;
}

ArchSpec bare_tile(int tracks) {
    auto s = fabric(1, 1, tracks, Topology::Wilton);
    s.pe_core.reset();
    s.mem_core.reset();
    s.io_core.reset();
    return s;
}

long select_bits(const StructNetlist &n) {
    long bits = 0;
    for (const auto &f : n.config)
        if (f.meaning == FieldMeaning::MuxSelect)
            bits += f.bit_width;
    return bits;
}

std::map<Prim, int> census(const StructNetlist &n) {
    std::map<Prim, int> c;
    for (const auto &i : n.instances)
        ++c[i.prim];
    return c;
}

const Instance &only(const StructNetlist &n, std::string_view name) {
    const auto *i = n.find_instance(name);
    REQUIRE(i != nullptr);
    return *i;
}

} // namespace

TEST_CASE("lower_static primitives") {
    ir::RoutingGraph g(1, 1);
    g.add_layer(16, 2);
    auto out = g.add_node(IrNode::switch_box(0, 0, Side::North, 0, Io::Out, 16));
    std::vector<NodeId> ins;
    for (auto s : {Side::East, Side::South, Side::West})
        ins.push_back(g.add_node(IrNode::switch_box(0, 0, s, 0, Io::In, 16)));
    for (auto i : ins)
        g.add_edge(i, out);
    auto single = g.add_node(IrNode::switch_box(0, 0, Side::East, 1, Io::Out, 16));
    g.add_edge(ins[0], single);

    auto n = lower_static(g);
    CHECK(check_netlist(n).empty());

    SUBCASE("fan-in 3 becomes MUX<3,16> with a 2-bit select") {
        const auto &mux = only(n, mux_instance(g.node(out)));
        CHECK(mux.prim == Prim::Mux);
        CHECK(mux.param("K") == 3);
        CHECK(mux.param("W") == 16);
        REQUIRE(mux.pin("sel"));
        CHECK(mux.pin("sel")->width_or(0) == 2);
        CHECK(mux.pin("in1")->wire == data_wire(g.node(ins[1])));
    }
    SUBCASE("fan-in 1 becomes a plain wire with no config bits") {
        CHECK(n.find_instance(mux_instance(g.node(single))) == nullptr);
        bool found = false;
        for (const auto &a : n.assigns)
            if (a.lhs == data_wire(g.node(single))) {
                found = true;
                CHECK(a.rhs.wire == data_wire(g.node(ins[0])));
            }
        CHECK(found);
        CHECK(select_bits(n) == 2);
    }
    SUBCASE("fan-in 0 is tied to constant zero") {
        const auto &c = only(n, "const_" + ir::node_name(g.node(ins[0])));
        CHECK(c.prim == Prim::Const);
        CHECK(c.param("VALUE") == 0);
    }
    SUBCASE("invalid graph") {
        auto bad = ir::deserialize_graph(
            "interlace-graph 1\narray 1 1\n[layer 16 tracks=1]\n"
            "node 0 sb 0 0 north 0 in delay=1\nedge 0 4\n");
        CHECK_THROWS_WITH_AS(lower_static(bad), doctest::Contains("diagnostics"), Error);
    }
}

TEST_CASE("select bits match the closed-form count on a 2x2 disjoint fabric") {
    for (int W : {1, 2, 3}) {
        auto spec = fabric(2, 2, W, Topology::Disjoint);
        auto n = lower_static(arch::create_uniform_interconnect(spec));
        // Every tile of a 2x2 array is an IO tile: 1 input, 1 output.
        const long sb_out = 4L * W * select_width(3 + 1);
        const long cb = select_width(4 * W);
        CHECK(select_bits(n) == 4 * (sb_out + cb));
        CHECK(check_netlist(n).empty());
    }
}

TEST_CASE("config map covers every select bit exactly once") {
    auto spec = fabric(4, 4, 3, Topology::Wilton, 1.0);
    auto g = arch::create_uniform_interconnect(spec);
    auto n = lower_static(g);
    CHECK(check_netlist(n).empty());

    long expected = 0;
    for (uint32_t i = 0; i < g.num_nodes(); ++i)
        expected += select_width(static_cast<int>(g.fan_in(NodeId{i}).size()));
    CHECK(select_bits(n) == expected);

    auto extracted = extract_config_map(n);
    CHECK(extracted == n.config);
    CHECK(parse_config_map(format_config_map(n.config)) == n.config);
    for (const auto &f : n.config) {
        auto a = unpack_address(f.address());
        CHECK(a.x == f.x);
        CHECK(a.y == f.y);
        CHECK(a.feature == f.feature);
        CHECK(a.reg == f.reg);
    }
    CHECK_THROWS_AS(parse_config_map("1 2 3\n"), ParseError);
}

TEST_CASE("ready-valid lowering") {
    auto spec = fabric(3, 3, 3, Topology::Wilton, 1.0);
    auto g = arch::create_uniform_interconnect(spec);
    auto st = lower_static(g);
    auto rv = lower_ready_valid(g);
    CHECK(check_netlist(rv).empty());

    SUBCASE("valid path adds no select bits") {
        CHECK(select_bits(rv) == select_bits(st));
        for (const auto &inst : rv.instances) {
            if (inst.name.rfind("vmux_", 0) != 0)
                continue;
            const auto &data = only(rv, inst.name.substr(1));
            CHECK(*inst.pin("sel") == *data.pin("sel"));
            CHECK(inst.param("W") == 1);
        }
    }
    SUBCASE("structure and valid mirror verify") {
        CHECK(verify_structure(g, rv).pass());
        auto mirror = verify_valid_mirror(g, rv);
        CHECK_MESSAGE(mirror.pass(), format_report(mirror));
    }
    SUBCASE("registers become FIFO registers with a mode field") {
        int fifo = 0, mode = 0, role = 0;
        for (const auto &i : rv.instances)
            fifo += i.prim == Prim::FifoReg;
        for (const auto &f : rv.config) {
            mode += f.meaning == FieldMeaning::FifoMode;
            role += f.meaning == FieldMeaning::SplitFifoRole;
        }
        CHECK(fifo > 0);
        CHECK(mode == fifo);
        CHECK(role == fifo);
    }
    SUBCASE("split control chains to the downstream register") {
        // Register on the east side of (0,1) feeds (1,1); the register on the
        // east side of (1,1) reads its control.
        auto up = *g.find(IrNode::reg(0, 1, Side::East, 0, 16));
        auto down = *g.find(IrNode::reg(1, 1, Side::East, 0, 16));
        const auto &r = only(rv, reg_instance(g.node(down)));
        CHECK(r.pin("ctl_in")->wire == "ctl_" + ir::node_name(g.node(up)));
    }
    SUBCASE("full2 mode has no role field") {
        auto f2 = lower_ready_valid(g, {FifoMode::Full2, 2});
        for (const auto &f : f2.config)
            CHECK(f.meaning != FieldMeaning::SplitFifoRole);
        CHECK(check_netlist(f2).empty());
    }
    SUBCASE("no registers yields a diagnostic") {
        auto plain = lower_ready_valid(
            arch::create_uniform_interconnect(fabric(2, 2, 2, Topology::Wilton)));
        REQUIRE(plain.diagnostics.size() == 1);
        CHECK(plain.diagnostics[0].rfind("NoRegisters", 0) == 0);
        CHECK(rv.diagnostics.empty());
    }
}

TEST_CASE("static vs ready-valid census on one switch box") {
    const int W = 5;
    auto g = arch::create_uniform_interconnect(bare_tile(W));
    auto st = census(lower_static(g));
    auto rv = census(lower_ready_valid(g));
    // 4W outgoing tracks each select among 3 incoming; 4W incoming tracks
    // have no upstream and are tied off.
    CHECK(st[Prim::Mux] == 4 * W);
    CHECK(st[Prim::Const] == 4 * W);
    // Valid muxes mirror data muxes; valid ties mirror data ties; every
    // incoming track joins the readies of its 3 consumers; outgoing tracks
    // have no consumer and see constant ready.
    CHECK(rv[Prim::Mux] == 2 * 4 * W);
    CHECK(rv[Prim::Join] == 4 * W);
    CHECK(rv[Prim::Const] == 4 * W + 4 * W + 4 * W);
    CHECK(rv[Prim::CfgReg] == st[Prim::CfgReg]);
}

TEST_CASE("ready join") {
    SUBCASE("routed north and west, west not ready") {
        // Source index 2 on both consumers' one-hot selects.
        std::vector<JoinInput> dirs{{1u << 2, true}, {0, true}, {0, true}, {1u << 2, false}};
        CHECK_FALSE(ready_join(dirs, 2));
        CHECK(ready_join_reference(dirs, 2) == false);
        dirs[3].ready = true;
        CHECK(ready_join(dirs, 2));
    }
    SUBCASE("routed nowhere") {
        CHECK(ready_join({{0, false}, {1u << 1, false}}, 0));
        CHECK(ready_join({}, 0));
    }
    SUBCASE("malformed one-hot") {
        CHECK_THROWS_AS(ready_join({{0b11, true}}, 0), Error);
        try {
            ready_join({{0b101, true}}, 0);
        } catch (const Error &e) {
            CHECK(e.code() == Errc::MalformedOneHot);
        }
    }
    SUBCASE("exhaustive against the reference") {
        // Each direction selects one of 3 fan-in indices or none.
        long mismatches = 0, cases = 0;
        for (int dirs = 2; dirs <= 4; ++dirs) {
            int states = 1;
            for (int i = 0; i < dirs; ++i)
                states *= 4;
            for (int s = 0; s < states; ++s)
                for (int r = 0; r < (1 << dirs); ++r) {
                    std::vector<JoinInput> in(dirs);
                    int code = s;
                    for (int d = 0; d < dirs; ++d, code /= 4) {
                        in[d].sel_onehot = code % 4 == 3 ? 0u : 1u << (code % 4);
                        in[d].ready = (r >> d) & 1;
                    }
                    for (int src = 0; src < 3; ++src) {
                        ++cases;
                        mismatches += ready_join(in, src) != ready_join_reference(in, src);
                    }
                }
        }
        CHECK(cases == 3 * (16 * 4 + 64 * 8 + 256 * 16));
        CHECK(mismatches == 0);
    }
}

TEST_CASE("emit and parse") {
    SUBCASE("empty netlist") {
        auto text = emit_rtl({});
        CHECK(text == "// interlace structural netlist\n\nmodule top;\nendmodule\n");
        CHECK(parse_rtl(text).instances.empty());
    }
    SUBCASE("single 2-input mux matches the golden file") {
        StructNetlist n;
        n.wires = {{"a", 16}, {"b", 16}, {"y", 16}, {"cfg", 32}};
        Instance mux;
        mux.name = "mux0";
        mux.prim = Prim::Mux;
        mux.params = {{"K", 2}, {"W", 16}, {"X", 0}, {"Y", 0}};
        mux.pins = {{"in0", {"a"}}, {"in1", {"b"}}, {"sel", {"cfg", 0, 0}}, {"out", {"y"}}};
        Instance cfg;
        cfg.name = "cfgreg0";
        cfg.prim = Prim::CfgReg;
        cfg.params = {{"W", 32}, {"X", 0}, {"Y", 0}};
        cfg.pins = {{"q", {"cfg"}}};
        Instance ca, cb;
        ca.name = "ca";
        cb.name = "cb";
        ca.params = cb.params = {{"VALUE", 0}, {"W", 16}, {"X", 0}, {"Y", 0}};
        ca.pins = {{"out", {"a"}}};
        cb.pins = {{"out", {"b"}}};
        n.instances = {mux, cfg, ca, cb};
        CHECK(check_netlist(n).size() == 0);
        auto golden = text::read_file(INTERLACE_TEST_DATA "/golden_mux2.v");
        CHECK(emit_rtl(n) == golden);
        CHECK(parse_rtl(golden).structurally_equal(n));
    }
    SUBCASE("2x2 fabric is a fixpoint") {
        auto g = arch::create_uniform_interconnect(fabric(2, 2, 2, Topology::Wilton, 1.0));
        for (bool rv : {false, true}) {
            auto n = rv ? lower_ready_valid(g) : lower_static(g);
            auto text = emit_rtl(n);
            auto back = parse_rtl(text);
            CHECK(back.structurally_equal(n));
            CHECK(emit_rtl(back) == text);
            CHECK(verify_structure(g, back).pass());
            auto fields = extract_config_map(back);
            CHECK(fields == n.config);
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(parse_rtl(""), ParseError);
        CHECK_THROWS_AS(parse_rtl("// only a comment\n"), ParseError);
        try {
            parse_rtl("module top;\n  wire a;\n  FOO u (.x(a));\nendmodule\n");
            FAIL("expected UnknownPrimitive");
        } catch (const ParseError &) {
            FAIL("wrong error type");
        } catch (const Error &e) {
            CHECK(e.code() == Errc::UnknownPrimitive);
            CHECK(std::string(e.what()).find("3:3") != std::string::npos);
        }
        try {
            parse_rtl("module top;\n  wire a\nendmodule\n");
            FAIL("expected ParseError");
        } catch (const ParseError &e) {
            CHECK(e.line() == 3);
            CHECK(e.column() == 1);
        }
    }
}

TEST_CASE("verify_structure") {
    auto g = arch::create_uniform_interconnect(fabric(3, 3, 3, Topology::Wilton, 1.0));
    auto n = lower_static(g);
    auto ok = verify_structure(g, n);
    CHECK(ok.pass());
    CHECK(ok.nodes_checked == g.num_nodes());
    CHECK(ok.edges_checked == g.edges().size());

    auto some_mux = [&]() -> Instance & {
        for (auto &i : n.instances)
            if (i.prim == Prim::Mux && i.param("K") >= 3)
                return i;
        FAIL("no mux");
        return n.instances.front();
    };

    SUBCASE("deleted mux input") {
        auto &mux = some_mux();
        mux.pins.erase(mux.pins.begin() + 1);
        auto rep = verify_structure(g, n);
        CHECK_FALSE(rep.pass());
        CHECK(rep.findings.size() == 1);
        CHECK(rep.count(FindingKind::MissingEdge) == 1);
    }
    SUBCASE("renamed sink in emitted text") {
        auto &mux = some_mux();
        auto victim = mux.pin("in0")->wire;
        auto text = emit_rtl(n);
        auto needle = ".in0(" + victim + ")";
        auto pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, needle.size(), ".in0(" + victim + "_typo)");
        auto rep = verify_structure(g, parse_rtl(text));
        CHECK(rep.findings.size() == 1);
        CHECK(rep.count(FindingKind::WrongInput) == 1);
    }
    SUBCASE("swapped inputs") {
        auto &mux = some_mux();
        std::swap(mux.pins[0].ref, mux.pins[1].ref);
        CHECK(verify_structure(g, n).count(FindingKind::WrongInput) == 2);
    }
    SUBCASE("missing node net") {
        auto other = arch::create_uniform_interconnect(fabric(4, 3, 3, Topology::Wilton, 1.0));
        auto rep = verify_structure(other, n);
        CHECK(rep.count(FindingKind::MissingWire) > 0);
        auto rep2 = verify_structure(g, lower_static(other));
        CHECK(rep2.count(FindingKind::ExtraWire) > 0);
    }
}

TEST_CASE("structural verification over a grid of fabrics") {
    for (int W = 2; W <= 4; ++W)
        for (auto topo : {Topology::Wilton, Topology::Disjoint})
            for (double d : {0.0, 1.0}) {
                auto g = arch::create_uniform_interconnect(fabric(3, 3, W, topo, d));
                auto n = lower_static(g);
                CHECK(verify_structure(g, n).pass());
                CHECK(check_netlist(n).empty());
            }
}

TEST_CASE("area proxy") {
    SUBCASE("empty netlist") {
        auto m = area_proxy({});
        CHECK(m.mux_input_count == 0);
        CHECK(m.config_bits == 0);
        CHECK(m.storage_bits == 0);
        CHECK(m.gate_count_estimate == 0);
    }
    SUBCASE("switch box area grows with tracks") {
        long long prev_inputs = -1, prev_gates = -1;
        std::vector<long long> inputs;
        for (int W = 1; W <= 8; ++W) {
            auto m = area_proxy(lower_static(arch::create_uniform_interconnect(bare_tile(W))));
            // 4W outgoing tracks x 3 inputs x 16 bits.
            CHECK(m.sb.mux_input_bits == 4LL * W * 3 * 16);
            CHECK(m.mux_input_count > prev_inputs);
            CHECK(m.gate_count_estimate > prev_gates);
            prev_inputs = m.mux_input_count;
            prev_gates = m.gate_count_estimate;
            inputs.push_back(m.mux_input_count);
        }
        for (size_t i = 2; i < inputs.size(); ++i)
            CHECK(inputs[i] - inputs[i - 1] == inputs[1] - inputs[0]);
    }
    SUBCASE("storage ordering static < split < full2") {
        auto g = arch::create_uniform_interconnect(fabric(4, 4, 4, Topology::Wilton, 1.0));
        auto st = area_proxy(lower_static(g)).storage_bits;
        auto split = area_proxy(lower_ready_valid(g, {FifoMode::Split, 2})).storage_bits;
        auto full = area_proxy(lower_ready_valid(g, {FifoMode::Full2, 2})).storage_bits;
        CHECK(0 < st);
        CHECK(st < split);
        CHECK(split < full);
        CHECK(split - st < full - st);
    }
    SUBCASE("monotone in policy sides") {
        long long prev_sb = -1, prev_cb = -1;
        for (int sides = 1; sides <= 4; ++sides) {
            auto spec = fabric(4, 4, 4, Topology::Wilton);
            spec.policy.sb_out_sides = arch::sides_after_removal(4 - sides);
            spec.policy.cb_sides = arch::sides_after_removal(4 - sides);
            auto m = area_proxy(lower_static(arch::create_uniform_interconnect(spec)));
            CHECK(m.sb.gate_estimate > prev_sb);
            CHECK(m.cb.gate_estimate > prev_cb);
            prev_sb = m.sb.gate_estimate;
            prev_cb = m.cb.gate_estimate;
        }
    }
}
