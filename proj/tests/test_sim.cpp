#include "doctest.h"

#include "interlace/arch/builder.hpp"
#include "interlace/arch/spec.hpp"
#include "interlace/error.hpp"
#include "interlace/pnr/place.hpp"
#include "interlace/pnr/route.hpp"
#include "interlace/rtl/netlist.hpp"
#include "interlace/sim/bitstream.hpp"
#include "interlace/sim/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

using namespace interlace;
using namespace interlace::sim;
using ir::NodeId;

namespace {

Errc code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    return Errc::Io;
}

bool is_mux(const ir::RoutingGraph &g, NodeId n) {
    return g.node(n).kind != ir::NodeKind::Register && g.fan_in(n).size() >= 2;
}

struct Routed {
    ir::RoutingGraph g;
    rtl::StructNetlist netlist;
    pnr::PackedGraph packed;
    pnr::Placement placement;
    pnr::RouteSet routes;
    std::map<std::string, pnr::NetTerminals> terms;
};

const char *kDesign = "inst in0 io\ninst in1 io\ninst out io\n"
                      "inst a pe\ninst b pe\ninst c pe\ninst m mem\ninst k const value=5\n"
                      "net in0.out0 -> a.in0,b.in1\nnet in1.out0 -> a.in1\n"
                      "net a.out0 -> b.in0,m.in0\nnet m.out0 -> c.in0\nnet k.out0 -> c.in2\n"
                      "net b.out0 -> c.in1\nnet c.out0 -> out.in0\n";

Routed routed_design(const arch::ArchSpec &spec, const std::string &app,
                     const pnr::RouteParams &params = {}) {
    Routed r{arch::create_uniform_interconnect(spec), {}, {}, {}, {}, {}};
    r.netlist = rtl::lower_static(r.g);
    r.packed = pnr::pack(pnr::parse_app(app));
    r.placement = pnr::place(r.packed, pnr::SiteMap::from_graph(r.g), {}).placement;
    r.routes = pnr::route(r.g, r.packed, r.placement, params).routes;
    for (auto &t : pnr::net_terminals(r.g, r.packed, r.placement))
        r.terms.emplace(t.net, t);
    return r;
}

// Independent oracle: tokens reach every sink of their own net and no other.
void check_delivery(const Routed &r, const ConfiguredFabric &f) {
    std::map<NodeId, uint64_t> stim;
    std::map<std::string, uint64_t> token_of;
    uint64_t next = 100;
    for (const auto &[net, t] : r.terms) {
        token_of[net] = next;
        stim[t.source] = next++;
    }
    auto arrivals = functional_sim(f, stim);
    for (const auto &[net, t] : r.terms)
        for (auto s : t.sinks) {
            INFO(net);
            REQUIRE(arrivals.count(s));
            CHECK(arrivals.at(s).token == token_of.at(net));
        }
}

} // namespace

TEST_CASE("bitstream of an empty route set") {
    auto g = arch::create_uniform_interconnect(arch::ArchSpec{});
    auto n = rtl::lower_static(g);
    pnr::PackedGraph empty;
    CHECK(generate_bitstream(g, n.config, {}, empty, {}).empty());
    BitstreamOptions all;
    all.include_defaults = true;
    auto b = generate_bitstream(g, n.config, {}, empty, {}, all);
    std::set<uint32_t> addresses;
    for (const auto &f : n.config)
        addresses.insert(f.address());
    CHECK(b.size() == addresses.size());
    for (const auto &w : b)
        CHECK(w.data == 0);
    auto f = configure(g, n.config, b);
    for (const auto &[node, sel] : f.select)
        CHECK(sel == 0);
    size_t sites = 0;
    for (uint32_t i = 0; i < g.num_nodes(); ++i)
        sites += is_mux(g, NodeId{i}) ? 1 : 0;
    CHECK(f.select.size() == sites);
}

TEST_CASE("one select per mux site on a routed path") {
    arch::ArchSpec spec;
    auto r = routed_design(spec, "inst i io\ninst a pe\nnet i.out0 -> a.in0\n");
    FieldIndex index(r.g, r.netlist.config);
    auto values = route_assignments(r.g, index, r.routes, r.packed, r.placement);
    size_t selects = 0;
    for (const auto &v : values)
        selects += v.field.meaning == rtl::FieldMeaning::MuxSelect ? 1 : 0;
    size_t sites = 0;
    for (const auto &[net, tree] : r.routes)
        for (auto n : tree.nodes())
            sites += is_mux(r.g, n) ? 1 : 0;
    CHECK(sites > 0);
    CHECK(selects == sites);
    // Decoding recovers the tree's selection function.
    auto f = configure(r.g, r.netlist.config,
                       pack_words(values, index, false));
    for (const auto &[node, sel] : tree_selections(r.g, r.routes))
        CHECK(f.select.at(node) == sel);
}

TEST_CASE("bitstream round trip on a placed and routed design") {
    arch::ArchSpec spec;
    auto r = routed_design(spec, kDesign);
    auto b = generate_bitstream(r.g, r.netlist.config, r.routes, r.packed, r.placement);
    CHECK(std::is_sorted(b.begin(), b.end()));
    CHECK(parse_bitstream(format_bitstream(b)) == b);
    // Generation is deterministic.
    CHECK(generate_bitstream(r.g, r.netlist.config, r.routes, r.packed, r.placement) == b);

    auto f = configure(r.g, r.netlist.config, b);
    for (const auto &[node, sel] : tree_selections(r.g, r.routes))
        CHECK(f.select.at(node) == sel);
    // The constant operand reaches the core config of its consumer.
    const auto &[cx, cy] = r.placement.at("c");
    CHECK(f.core.at({cx, cy}).at("c_in2_const_en") == 1);
    CHECK(f.core.at({cx, cy}).at("c_in2_const") == 5);
    check_delivery(r, f);

    // The structural map decodes the same bitstream identically.
    auto hw = configure(r.g, rtl::extract_config_map(r.netlist), b);
    CHECK(hw.select == f.select);
    check_delivery(r, hw);
}

TEST_CASE("bitstream errors") {
    arch::ArchSpec spec;
    auto r = routed_design(spec, kDesign);

    // Two nets claiming one node.
    auto clash = r.routes;
    auto it = clash.begin();
    auto &victim = std::next(it)->second.branches[0];
    victim[1] = it->second.branches[0][1];
    CHECK(code_of([&] {
              generate_bitstream(r.g, r.netlist.config, clash, r.packed, r.placement);
          }) == Errc::FieldConflict);

    // Missing map entry.
    auto partial = r.netlist.config;
    partial.erase(std::remove_if(partial.begin(), partial.end(),
                                 [](const rtl::ConfigField &f) {
                                     return f.meaning == rtl::FieldMeaning::MuxSelect;
                                 }),
                  partial.end());
    CHECK(code_of([&] {
              generate_bitstream(r.g, partial, r.routes, r.packed, r.placement);
          }) == Errc::UnknownField);

    // An address outside the map.
    CHECK(code_of([&] { configure(r.g, r.netlist.config, {{0xFFFFFFFFu, 1}}); }) ==
          Errc::BadAddress);

    // A select past the mux fan-in: find a mux whose field can encode it.
    bool found = false;
    FieldIndex index(r.g, r.netlist.config);
    for (uint32_t i = 0; i < r.g.num_nodes() && !found; ++i) {
        NodeId n{i};
        if (!is_mux(r.g, n))
            continue;
        const auto *f = index.select_of(n);
        const auto k = r.g.fan_in(n).size();
        if (!f || (1ULL << f->bit_width) <= k)
            continue;
        found = true;
        auto b = pack_words({{*f, k}}, index, false);
        CHECK(code_of([&] { configure(r.g, r.netlist.config, b); }) == Errc::SelectOutOfRange);
        CHECK(code_of([&] { pack_words({{*f, 1ULL << f->bit_width}}, index, false); }) ==
              Errc::SelectOutOfRange);
        CHECK(code_of([&] { pack_words({{*f, 0}, {*f, 1}}, index, false); }) ==
              Errc::FieldConflict);
    }
    CHECK(found);

    CHECK_THROWS_AS(parse_bitstream("0000000 00000001\n"), ParseError);
    CHECK_THROWS_AS(parse_bitstream("00000001 0000000G\n"), ParseError);
    CHECK_THROWS_AS(parse_bitstream("00000002 00000000\n00000001 00000000\n"), ParseError);
    CHECK_THROWS_AS(parse_bitstream("00000001\n"), ParseError);
    CHECK(parse_bitstream("# comment\n\n0000ABCD 0000ffff\n") ==
          Bitstream{{0xABCD, 0xFFFF}});
}

TEST_CASE("functional simulation") {
    SUBCASE("an unselected input is blocked") {
        ir::RoutingGraph g(1, 1);
        g.add_layer(16, 2);
        auto a = g.add_node(ir::IrNode::switch_box(0, 0, ir::Side::North, 0, ir::Io::In, 16, 1));
        auto b = g.add_node(ir::IrNode::switch_box(0, 0, ir::Side::West, 0, ir::Io::In, 16, 1));
        auto m = g.add_node(ir::IrNode::switch_box(0, 0, ir::Side::East, 0, ir::Io::Out, 16, 0));
        g.add_edge(a, m);
        g.add_edge(b, m);
        ConfiguredFabric f;
        f.graph = &g;
        f.select[m] = 1;
        auto out = functional_sim(f, {{a, 7}});
        CHECK(!out.count(m));
        out = functional_sim(f, {{a, 7}, {b, 9}});
        CHECK(out.at(m) == Arrival{9, 0});
        f.select[m] = 0;
        CHECK(functional_sim(f, {{a, 7}}).at(m) == Arrival{7, 0});
    }
    SUBCASE("routes on a registered fabric deliver") {
        arch::ArchSpec spec;
        spec.layers[0].reg_density = 1.0;
        pnr::RouteParams params;
        params.allow_registers = true;
        auto r = routed_design(spec, kDesign, params);
        auto b = generate_bitstream(r.g, r.netlist.config, r.routes, r.packed, r.placement);
        auto f = configure(r.g, r.netlist.config, b);
        check_delivery(r, f);
    }
    SUBCASE("ticks count registers on the path") {
        arch::ArchSpec spec;
        spec.layers[0].reg_density = 1.0;
        auto g = arch::create_uniform_interconnect(spec);
        auto n = rtl::lower_static(g);
        auto src = *g.find_port(1, 1, "out0");
        auto dst = *g.find_port(5, 4, "in0");
        auto path =
            pnr::dijkstra(g, {src}, dst, [](NodeId) { return 1.0; }).nodes;
        // Take the register at every bypassable hop.
        std::vector<NodeId> via;
        int regs = 0;
        for (size_t i = 0; i < path.size(); ++i) {
            if (i > 0 && g.node(path[i]).kind == ir::NodeKind::RegMux)
                for (auto r : g.fan_in(path[i]))
                    if (g.node(r).kind == ir::NodeKind::Register &&
                        g.has_edge(path[i - 1], r)) {
                        via.push_back(r);
                        ++regs;
                        break;
                    }
            via.push_back(path[i]);
        }
        REQUIRE(regs > 0);
        pnr::RouteSet routes{{"n", pnr::RouteTree{"n", src, {dst}, {via}}}};
        auto b = generate_bitstream(g, n.config, routes, {}, {});
        auto f = configure(g, n.config, b);
        auto arrivals = functional_sim(f, {{src, 3}});
        CHECK(arrivals.at(dst) == Arrival{3, regs});
    }
}

TEST_CASE("exhaustive sweep") {
    arch::ArchSpec spec;
    spec.width = 2;
    spec.height = 2;
    spec.mem_column_stride = 0;
    spec.layers[0].num_tracks = 2;
    spec.layers[0].topology = arch::Topology::Disjoint;
    auto g = arch::create_uniform_interconnect(spec);
    auto n = rtl::lower_static(g);
    auto report = exhaustive_sweep(g, n);
    CHECK(report.cases == g.edges().size());
    CHECK(report.pass());
    CHECK(format_sweep_report(g, report) ==
          fmt::format("sweep: {} cases, 0 failures\n", report.cases));

    SUBCASE("misplaced select fields are localized") {
        // Swap the storage of two equal-width selects in the sidecar only.
        // Writing a nonzero select for one mux lands in the other, so every
        // edge into either mux with a nonzero index fails.
        auto sidecar = n.config;
        FieldIndex index(g, sidecar);
        std::vector<size_t> sels;
        for (size_t i = 0; i < sidecar.size(); ++i)
            if (sidecar[i].meaning == rtl::FieldMeaning::MuxSelect &&
                index.node_of(sidecar[i].target_inst))
                sels.push_back(i);
        REQUIRE(sels.size() >= 2);
        size_t ia = sels[0], ib = 0;
        for (size_t k = 1; k < sels.size(); ++k)
            if (sidecar[sels[k]].bit_width == sidecar[ia].bit_width) {
                ib = sels[k];
                break;
            }
        REQUIRE(ib != 0);
        const NodeId A = *index.node_of(sidecar[ia].target_inst);
        const NodeId B = *index.node_of(sidecar[ib].target_inst);
        std::swap(sidecar[ia].x, sidecar[ib].x);
        std::swap(sidecar[ia].y, sidecar[ib].y);
        std::swap(sidecar[ia].feature, sidecar[ib].feature);
        std::swap(sidecar[ia].reg, sidecar[ib].reg);
        std::swap(sidecar[ia].bit_offset, sidecar[ib].bit_offset);

        std::set<std::pair<uint32_t, uint32_t>> expected;
        for (auto m : {A, B}) {
            auto fi = g.fan_in(m);
            for (size_t k = 1; k < fi.size(); ++k)
                expected.insert({fi[k].value, m.value});
        }
        auto bad = exhaustive_sweep(g, sidecar, rtl::extract_config_map(n));
        std::set<std::pair<uint32_t, uint32_t>> got;
        for (const auto &f : bad.failures)
            got.insert({f.src.value, f.dst.value});
        CHECK(bad.cases == g.edges().size());
        CHECK(got == expected);
        CHECK(format_sweep_report(g, bad).find("FAIL ") != std::string::npos);
    }
}

TEST_CASE("sweep on a fabric without edges") {
    ir::RoutingGraph g(1, 1);
    g.add_layer(16, 1);
    auto r = exhaustive_sweep(g, {}, {});
    CHECK(r.cases == 0);
    CHECK(r.pass());
}

TEST_CASE("FIFO token stream") {
    SUBCASE("always ready") {
        auto r = simulate_stream({2, 1, 1}, 20, {true}, 1000);
        REQUIRE(r.delivered.size() == 20);
        for (uint64_t i = 0; i < 20; ++i)
            CHECK(r.delivered[i] == i);
        CHECK(r.cycles == 23);
    }
    SUBCASE("random back-pressure never overflows or reorders") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<int> depths;
            for (int k = 0, n = 1 + static_cast<int>(rng() % 5); k < n; ++k)
                depths.push_back(1 + static_cast<int>(rng() % 2));
            std::vector<bool> ready;
            for (int k = 0; k < 7; ++k)
                ready.push_back(rng() % 3 != 0);
            ready[0] = true;
            auto r = simulate_stream(depths, 30, ready, 10000);
            REQUIRE(r.delivered.size() == 30);
            for (uint64_t i = 0; i < 30; ++i)
                CHECK(r.delivered[i] == i);
            for (size_t k = 0; k < depths.size(); ++k)
                CHECK(r.max_occupancy[k] <= depths[k]);
        }
    }
    SUBCASE("a sink that never accepts stalls the chain at capacity") {
        auto r = simulate_stream({2, 1}, 10, {false}, 50);
        CHECK(r.delivered.empty());
        CHECK(r.max_occupancy == std::vector<int>{2, 1});
        CHECK(r.cycles == 50);
    }
    CHECK(code_of([] { simulate_stream({0}, 1, {true}, 10); }) == Errc::InvalidSpec);
}
